use rayon::prelude::*;

use super::{attach_borders, check_consistent};
use crate::error::Result;
use crate::kernels::{ones, NeighborhoodMatrix, ValidVector};
use crate::labels::{canonicalize, Labeling, NOISE};
use crate::workers;

/// Transition counts observed by an audited merge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeAudit {
    pub passes: usize,
    pub merges: usize,
    /// Target-row bits that went 0 -> 1.
    pub bits_set: u64,
    /// Target-row bits that went 1 -> 0. Must stay zero.
    pub bits_cleared: u64,
    /// Valid flags that went 1 -> 0.
    pub valid_cleared: u64,
    /// Valid flags that went 0 -> 1. Must stay zero.
    pub valid_revived: u64,
}

/// Cluster matrix and liveness flags while merging. Bits only ever go
/// 0 -> 1 and valid flags only 1 -> 0.
#[derive(Debug, Clone)]
pub struct MergeState {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
    valid: ValidVector,
    core: ValidVector,
    owner: Vec<usize>,
}

impl MergeState {
    pub fn new(bits: NeighborhoodMatrix, valid: ValidVector) -> Result<Self> {
        check_consistent(&bits, &valid)?;
        let words_per_row = bits.words_per_row();
        let (n, words, _) = bits.into_parts();
        Ok(MergeState {
            n,
            words_per_row,
            words,
            core: valid.clone(),
            valid,
            owner: (0..n).collect(),
        })
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn valid(&self) -> &ValidVector {
        &self.valid
    }

    /// Rows still alive: cores that have not been absorbed.
    pub fn surviving(&self) -> Vec<usize> {
        self.valid.indices().collect()
    }

    /// Live clusters other than `t` whose core lies in row `t`.
    fn candidates(&self, t: usize) -> Vec<usize> {
        let masked: Vec<u64> = self
            .row(t)
            .iter()
            .zip(self.valid.words())
            .map(|(r, v)| r & v)
            .collect();
        ones(&masked).filter(|&c| c != t).collect()
    }

    /// Absorbs every cluster reachable from target `t`, one pass at a time,
    /// until a pass merges nothing. Returns the number of clusters merged.
    pub fn merge_target(
        &mut self,
        t: usize,
        threads: usize,
        mut audit: Option<&mut MergeAudit>,
    ) -> usize {
        if !self.valid.is_valid(t) {
            return 0;
        }
        let w = self.words_per_row;
        let chunk = w.div_ceil(threads.max(1)).max(16);
        let mut merged = 0;
        loop {
            let sources = self.candidates(t);
            if let Some(a) = audit.as_deref_mut() {
                a.passes += 1;
            }
            if sources.is_empty() {
                break;
            }
            let valid_before = audit.is_some().then(|| self.valid.words().to_vec());

            // Each worker owns a slice of the target row and ORs every
            // source row into it.
            let before = self.row(t).to_vec();
            let mut acc = before.clone();
            let words = &self.words;
            workers::install(threads, || {
                acc.par_chunks_mut(chunk)
                    .enumerate()
                    .for_each(|(ci, part)| {
                        let off = ci * chunk;
                        for &s in &sources {
                            let src = &words[s * w + off..s * w + off + part.len()];
                            for (a, b) in part.iter_mut().zip(src) {
                                *a |= *b;
                            }
                        }
                    });
            });
            self.words[t * w..(t + 1) * w].copy_from_slice(&acc);

            let valid_words = self.valid.words_mut();
            for &s in &sources {
                valid_words[s / 64] &= !(1u64 << (s % 64));
                self.owner[s] = t;
            }
            merged += sources.len();

            if let (Some(a), Some(vb)) = (audit.as_deref_mut(), valid_before) {
                a.merges += sources.len();
                for (b, n) in before.iter().zip(&acc) {
                    a.bits_set += (!b & n).count_ones() as u64;
                    a.bits_cleared += (b & !n).count_ones() as u64;
                }
                for (b, n) in vb.iter().zip(self.valid.words()) {
                    a.valid_cleared += (b & !n).count_ones() as u64;
                    a.valid_revived += (!b & n).count_ones() as u64;
                }
            }
        }
        merged
    }

    /// Runs every still-valid target in ascending point order.
    pub fn run(&mut self, threads: usize, mut audit: Option<&mut MergeAudit>) {
        for t in 0..self.n {
            if self.valid.is_valid(t) {
                self.merge_target(t, threads, audit.as_deref_mut());
            }
        }
    }

    fn root(&self, mut p: usize) -> usize {
        while self.owner[p] != p {
            p = self.owner[p];
        }
        p
    }

    /// Cores take the index of the surviving row that absorbed them;
    /// border points follow their lowest-indexed in-range core.
    pub fn labels(&self, original: &NeighborhoodMatrix) -> Labeling {
        let mut labels = vec![NOISE; self.n];
        for p in self.core.indices() {
            labels[p] = self.root(p) as i64;
        }
        attach_borders(original, &self.core, &mut labels);
        canonicalize(&Labeling::new(labels))
    }
}

/// Target-by-target merging: for each live target in ascending order,
/// absorb every live core cluster whose core lies in the target row,
/// repeating until no more merge.
pub fn merge_iterative(
    bits: &NeighborhoodMatrix,
    valid: &ValidVector,
    threads: usize,
) -> Result<Labeling> {
    let mut state = MergeState::new(bits.clone(), valid.clone())?;
    state.run(threads, None);
    Ok(state.labels(bits))
}

/// As [`merge_iterative`], also recording every bit and flag transition.
pub fn merge_iterative_audited(
    bits: &NeighborhoodMatrix,
    valid: &ValidVector,
    threads: usize,
) -> Result<(Labeling, MergeAudit, MergeState)> {
    let mut state = MergeState::new(bits.clone(), valid.clone())?;
    let mut audit = MergeAudit::default();
    state.run(threads, Some(&mut audit));
    Ok((state.labels(bits), audit, state))
}

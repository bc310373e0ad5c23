use rayon::prelude::*;

use super::{attach_borders, check_consistent};
use crate::error::Result;
use crate::kernels::{ones, words_for, NeighborhoodMatrix, ValidVector};
use crate::labels::{canonicalize, Labeling, NOISE};
use crate::workers;

/// Neighborhood relation restricted to core points, bit-packed m x m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreAdjacency {
    cores: Vec<usize>,
    words_per_row: usize,
    words: Vec<u64>,
}

impl CoreAdjacency {
    /// Builds an adjacency over `m` abstract cores, with core rank `a`
    /// standing for point `a`.
    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let wpr = words_for(m);
        let mut words = vec![0u64; m * wpr];
        for a in 0..m {
            for b in 0..m {
                if f(a, b) {
                    words[a * wpr + b / 64] |= 1 << (b % 64);
                }
            }
        }
        CoreAdjacency {
            cores: (0..m).collect(),
            words_per_row: wpr,
            words,
        }
    }

    /// Number of cores.
    pub fn m(&self) -> usize {
        self.cores.len()
    }

    /// Point index of each core rank.
    pub fn cores(&self) -> &[usize] {
        &self.cores
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.words[a * self.words_per_row + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn row_words(&self, a: usize) -> &[u64] {
        &self.words[a * self.words_per_row..(a + 1) * self.words_per_row]
    }

    /// Component id per core rank, numbered by lowest member. Only
    /// meaningful once the relation is closed.
    pub fn components(&self) -> Vec<usize> {
        let m = self.m();
        let mut comp = vec![usize::MAX; m];
        let mut next = 0;
        for a in 0..m {
            if comp[a] != usize::MAX {
                continue;
            }
            for b in ones(self.row_words(a)) {
                if comp[b] == usize::MAX {
                    comp[b] = next;
                }
            }
            comp[a] = next;
            next += 1;
        }
        comp
    }
}

pub fn build_core_adjacency(bits: &NeighborhoodMatrix, valid: &ValidVector) -> CoreAdjacency {
    let cores: Vec<usize> = valid.indices().collect();
    let m = cores.len();
    let mut rank = vec![usize::MAX; bits.n()];
    for (r, &p) in cores.iter().enumerate() {
        rank[p] = r;
    }
    let wpr = words_for(m);
    let mut words = vec![0u64; m * wpr];
    for (a, &p) in cores.iter().enumerate() {
        let masked: Vec<u64> = bits
            .row_words(p)
            .iter()
            .zip(valid.words())
            .map(|(r, v)| r & v)
            .collect();
        for q in ones(&masked) {
            let b = rank[q];
            words[a * wpr + b / 64] |= 1 << (b % 64);
        }
    }
    CoreAdjacency {
        cores,
        words_per_row: wpr,
        words,
    }
}

const PIVOT_ROWS: usize = 64;

/// Transitive closure by Warshall's recurrence: for each pivot `k`, every
/// row that reaches `k` absorbs row `k`. Rows are updated in parallel
/// within a pivot; pivots run in order.
///
/// `adj` must be symmetric and reflexive. Symmetry is preserved by every
/// pivot step, so the rows reaching `k` are read off row `k` itself
/// instead of probing column `k` of every row.
pub fn warshall_closure(adj: &CoreAdjacency, threads: usize) -> CoreAdjacency {
    let mut out = adj.clone();
    let m = out.m();
    if m == 0 {
        return out;
    }
    let wpr = out.words_per_row;
    let mut pivot = vec![0u64; wpr];
    workers::install(threads, || {
        for k in 0..m {
            pivot.copy_from_slice(out.row_words(k));
            let pivot = &pivot;
            out.words
                .par_chunks_mut(wpr * PIVOT_ROWS)
                .enumerate()
                .for_each(|(blk, block)| {
                    for (r, row) in block.chunks_exact_mut(wpr).enumerate() {
                        let a = blk * PIVOT_ROWS + r;
                        if a != k && pivot[a / 64] >> (a % 64) & 1 == 1 {
                            for (x, y) in row.iter_mut().zip(pivot) {
                                *x |= *y;
                            }
                        }
                    }
                });
        }
    });
    out
}

/// Cores grouped by the closed core relation; border points attached by
/// lowest-indexed in-range core.
pub fn merge_warshall(
    bits: &NeighborhoodMatrix,
    valid: &ValidVector,
    threads: usize,
) -> Result<Labeling> {
    check_consistent(bits, valid)?;
    let closed = warshall_closure(&build_core_adjacency(bits, valid), threads);
    let mut labels = vec![NOISE; bits.n()];
    for (rank, comp) in closed.components().into_iter().enumerate() {
        labels[closed.cores[rank]] = comp as i64;
    }
    attach_borders(bits, valid, &mut labels);
    Ok(canonicalize(&Labeling::new(labels)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_cores() {
        let bits = NeighborhoodMatrix::from_fn(4, |i, j| i == j);
        let valid = ValidVector::from_counts(bits.neighbor_counts(), 2);
        let adj = build_core_adjacency(&bits, &valid);
        assert_eq!(adj.m(), 0);
        assert_eq!(warshall_closure(&adj, 2).m(), 0);
        assert_eq!(
            merge_warshall(&bits, &valid, 1).unwrap().into_vec(),
            vec![-1; 4]
        );
    }

    #[test]
    fn collinear_cores() {
        let bits = NeighborhoodMatrix::from_fn(3, |i, j| i.abs_diff(j) <= 1);
        let valid = ValidVector::from_counts(bits.neighbor_counts(), 2);
        let adj = build_core_adjacency(&bits, &valid);
        assert_eq!(adj.m(), 3);
        assert!(adj.get(0, 1) && adj.get(1, 2) && !adj.get(0, 2));
        let closed = warshall_closure(&adj, 1);
        assert!(closed.get(0, 2) && closed.get(2, 0));
        assert_eq!(closed.components(), vec![0, 0, 0]);
        assert_eq!(
            merge_warshall(&bits, &valid, 1).unwrap().into_vec(),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn complete_and_identity() {
        let bits = NeighborhoodMatrix::from_fn(5, |_, _| true);
        let valid = ValidVector::from_counts(bits.neighbor_counts(), 1);
        let adj = build_core_adjacency(&bits, &valid);
        assert!((0..5).all(|a| (0..5).all(|b| adj.get(a, b))));

        let id = CoreAdjacency::from_fn(70, |a, b| a == b);
        assert_eq!(warshall_closure(&id, 3), id);
    }

    #[test]
    fn restricts_to_cores() {
        // point 1 is the only non-core; core ranks are 0->0, 1->2, 2->3
        let bits = NeighborhoodMatrix::from_fn(4, |i, j| {
            i == j || i.min(j) != 1 || (i.max(j) == 2 && i.min(j) == 1)
        });
        let valid = ValidVector::from_flags(&[true, false, true, true], 3);
        let adj = build_core_adjacency(&bits, &valid);
        assert_eq!(adj.cores(), &[0, 2, 3]);
        assert!(adj.get(0, 1) && adj.get(1, 2));
    }
}

use crate::error::{Error, Result};

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// Indices of set bits, ascending.
pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + b)
            }
        })
    })
}

/// Dense row-major n x n matrix of 32-bit squared distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSqMatrix {
    n: usize,
    values: Vec<f32>,
}

impl DistSqMatrix {
    pub(crate) fn from_parts(n: usize, values: Vec<f32>) -> Self {
        debug_assert_eq!(values.len(), n * n);
        DistSqMatrix { n, values }
    }

    /// Builds a matrix from row-major values; checks shape, finiteness,
    /// non-negativity, zero diagonal and symmetry.
    pub fn from_values(n: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InconsistentInput(format!(
                "{} values do not form a {n}x{n} matrix",
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InconsistentInput(format!(
                    "diagonal entry {i} is not zero"
                )));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InconsistentInput(format!("entry ({i},{j}) = {v}")));
                }
                if v.to_bits() != values[j * n + i].to_bits() {
                    return Err(Error::InconsistentInput(format!(
                        "entry ({i},{j}) is not symmetric"
                    )));
                }
            }
        }
        Ok(DistSqMatrix { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    /// Bitwise comparison (distinguishes -0.0 and NaN payloads).
    pub fn bitwise_eq(&self, other: &DistSqMatrix) -> bool {
        self.n == other.n
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Bit-packed n x n neighborhood ("cluster") matrix: row i is the
/// eps-neighborhood of point i, i.e. its primitive cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
    neighbor_count: Vec<u32>,
}

impl NeighborhoodMatrix {
    pub(crate) fn from_words(n: usize, words: Vec<u64>, neighbor_count: Vec<u32>) -> Self {
        debug_assert_eq!(words.len(), n * words_for(n));
        debug_assert_eq!(neighbor_count.len(), n);
        NeighborhoodMatrix {
            n,
            words_per_row: words_for(n),
            words,
            neighbor_count,
        }
    }

    /// Builds a matrix from a predicate; counts are derived from the bits.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let wpr = words_for(n);
        let mut words = vec![0u64; n * wpr];
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    words[i * wpr + j / 64] |= 1 << (j % 64);
                }
            }
        }
        let counts = words
            .chunks(wpr.max(1))
            .take(n)
            .map(|r| r.iter().map(|w| w.count_ones()).sum())
            .collect();
        Self::from_words(n, words, counts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// Column indices set in row i, ascending.
    pub fn row_indices(&self, i: usize) -> Vec<usize> {
        ones(self.row_words(i)).collect()
    }

    pub fn neighbor_count(&self, i: usize) -> u32 {
        self.neighbor_count[i]
    }

    pub fn neighbor_counts(&self) -> &[u32] {
        &self.neighbor_count
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn into_parts(self) -> (usize, Vec<u64>, Vec<u32>) {
        (self.n, self.words, self.neighbor_count)
    }

    /// Checks reflexivity, symmetry and that counts match row popcounts.
    pub fn check_invariants(&self) -> Result<()> {
        for i in 0..self.n {
            if !self.get(i, i) {
                return Err(Error::InconsistentInput(format!("bit ({i},{i}) is clear")));
            }
            let pop: u32 = self.row_words(i).iter().map(|w| w.count_ones()).sum();
            if pop != self.neighbor_count[i] {
                return Err(Error::InconsistentInput(format!(
                    "row {i} has {pop} bits but count {}",
                    self.neighbor_count[i]
                )));
            }
            for j in ones(self.row_words(i)) {
                if !self.get(j, i) {
                    return Err(Error::InconsistentInput(format!(
                        "bit ({i},{j}) has no mirror"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Core-point flags: `valid[i]` iff row i's neighbor count reaches
/// `min_pts`. Bit-packed like the neighborhood rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidVector {
    n: usize,
    min_pts: usize,
    words: Vec<u64>,
}

impl ValidVector {
    pub fn from_counts(counts: &[u32], min_pts: usize) -> Self {
        let flags: Vec<bool> = counts.iter().map(|&c| c as usize >= min_pts).collect();
        Self::from_flags(&flags, min_pts)
    }

    /// Raw constructor; consistency with counts is checked by consumers.
    pub fn from_flags(flags: &[bool], min_pts: usize) -> Self {
        let mut words = vec![0u64; words_for(flags.len())];
        for (i, _) in flags.iter().enumerate().filter(|(_, &f)| f) {
            words[i / 64] |= 1 << (i % 64);
        }
        ValidVector {
            n: flags.len(),
            min_pts,
            words,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn min_pts(&self) -> usize {
        self.min_pts
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        ones(&self.words)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn to_flags(&self) -> Vec<bool> {
        (0..self.n).map(|i| self.is_valid(i)).collect()
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }
}

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Label given to points that belong to no cluster.
pub const NOISE: i64 = -1;

/// Per-point cluster ids, `NOISE` for unclustered points. Ids need not be
/// contiguous until passed through [`canonicalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    labels: Vec<i64>,
}

impl Labeling {
    pub fn new(labels: Vec<i64>) -> Self {
        Labeling { labels }
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.labels
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.labels[i]
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == NOISE).count()
    }

    /// Number of distinct non-noise ids.
    pub fn cluster_count(&self) -> usize {
        let mut ids: Vec<i64> = self
            .labels
            .iter()
            .copied()
            .filter(|&l| l != NOISE)
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

impl From<Vec<i64>> for Labeling {
    fn from(labels: Vec<i64>) -> Self {
        Labeling::new(labels)
    }
}

/// Renumbers clusters 0, 1, 2, ... by first appearance; noise is kept.
pub fn canonicalize(labeling: &Labeling) -> Labeling {
    let mut remap: HashMap<i64, i64> = HashMap::new();
    let labels = labeling
        .labels
        .iter()
        .map(|&l| {
            if l == NOISE {
                NOISE
            } else {
                let next = remap.len() as i64;
                *remap.entry(l).or_insert(next)
            }
        })
        .collect();
    Labeling { labels }
}

/// One integer per line, in point order. Callers never pass an empty
/// labeling since point sets are non-empty.
pub fn write_labels(labeling: &Labeling, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for l in &labeling.labels {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Labeling> {
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let l = line.parse::<i64>().map_err(|_| Error::Parse {
            line: idx + 1,
            token: line.to_string(),
        })?;
        labels.push(l);
    }
    Ok(Labeling { labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn canon(v: Vec<i64>) -> Vec<i64> {
        canonicalize(&Labeling::new(v)).into_vec()
    }

    #[test]
    fn first_appearance_order() {
        assert_eq!(canon(vec![7, 7, 3, -1]), vec![0, 0, 1, -1]);
        assert_eq!(canon(vec![-1, -1]), vec![-1, -1]);
        assert_eq!(canon(vec![2, 1, 2]), vec![0, 1, 0]);
    }

    #[test]
    fn label_file_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.txt");
        write_labels(&Labeling::new(vec![0, 0, -1]), &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "0\n0\n-1\n");
        write_labels(&Labeling::new(vec![5]), &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "5\n");
        assert_eq!(load_labels(&path).unwrap().into_vec(), vec![5]);
    }

    #[test]
    fn counts() {
        let l = Labeling::new(vec![4, -1, 4, 9, -1]);
        assert_eq!(l.noise_count(), 2);
        assert_eq!(l.cluster_count(), 2);
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(v in prop::collection::vec(-1i64..6, 0..40)) {
            let once = canon(v);
            prop_assert_eq!(canon(once.clone()), once);
        }
    }
}

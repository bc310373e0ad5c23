//! Textbook serial DBSCAN, in three timed stages: pairwise distances,
//! neighborhoods and core flags, then merging cores reachable through
//! chains of cores. Every parallel path is checked against this.
//!
//! Conventions shared by the whole crate: a point's neighborhood includes
//! itself, the radius test is `dist^2 <= eps^2`, and a border point joins
//! the cluster of its lowest-indexed in-range core point.

use std::collections::VecDeque;
use std::time::Instant;

use crate::budget::MemoryBudget;
use crate::error::{Error, Result};
use crate::labels::{canonicalize, Labeling, NOISE};
use crate::params::DbscanParams;
use crate::points::PointSet;

/// How the oracle holds the distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStorage {
    /// Whole upper triangle in `f64`, computed before any thresholding.
    FullMatrix,
    /// One `f64` row at a time; for sizes whose triangle exceeds memory.
    RowBuffered,
}

impl OracleStorage {
    pub fn matrix_bytes(n: usize) -> u64 {
        let n = n as u64;
        n * n.saturating_sub(1) / 2 * 8
    }

    /// Full matrix when it fits the configured memory cap.
    pub fn auto(n: usize) -> Self {
        let budget = MemoryBudget::from_env().unwrap_or_default();
        if budget.check(Self::matrix_bytes(n)).is_ok() {
            OracleStorage::FullMatrix
        } else {
            OracleStorage::RowBuffered
        }
    }
}

/// Wall time per stage, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTrace {
    pub dist_sq_ms: f64,
    pub cluster_build_ms: f64,
    pub merge_ms: f64,
    pub core_count: usize,
    pub storage: OracleStorage,
}

impl OracleTrace {
    pub fn total_ms(&self) -> f64 {
        self.dist_sq_ms + self.cluster_build_ms + self.merge_ms
    }
}

pub fn brute_force_neighbors(
    points: &PointSet,
    i: usize,
    params: &DbscanParams,
) -> Result<Vec<usize>> {
    let n = points.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok((0..n)
        .filter(|&j| points.dist_sq(i, j) <= params.eps_sq())
        .collect())
}

pub fn serial_dbscan(points: &PointSet, params: &DbscanParams) -> (Labeling, OracleTrace) {
    serial_dbscan_with(points, params, OracleStorage::auto(points.len()))
}

pub fn serial_dbscan_with(
    points: &PointSet,
    params: &DbscanParams,
    storage: OracleStorage,
) -> (Labeling, OracleTrace) {
    let (neighbors, dist_sq_ms, cluster_build_ms) = match storage {
        OracleStorage::FullMatrix => neighborhoods_full(points, params),
        OracleStorage::RowBuffered => neighborhoods_rowwise(points, params),
    };

    let start = Instant::now();
    let core: Vec<bool> = neighbors
        .iter()
        .map(|l| l.len() >= params.min_pts())
        .collect();
    let labels = merge_cores(&neighbors, &core);
    let merge_ms = ms(start);

    let trace = OracleTrace {
        dist_sq_ms,
        cluster_build_ms,
        merge_ms,
        core_count: core.iter().filter(|&&c| c).count(),
        storage,
    };
    (canonicalize(&Labeling::new(labels)), trace)
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

// Neighbor lists come out sorted ascending and include the point itself.
fn neighborhoods_full(points: &PointSet, params: &DbscanParams) -> (Vec<Vec<u32>>, f64, f64) {
    let n = points.len();
    let start = Instant::now();
    let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            upper.push(points.dist_sq(i, j));
        }
    }
    let dist_ms = ms(start);

    let start = Instant::now();
    let eps_sq = params.eps_sq();
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut offset = 0;
    for i in 0..n {
        neighbors[i].push(i as u32);
        let row = &upper[offset..offset + (n - i - 1)];
        for (k, &d) in row.iter().enumerate() {
            if d <= eps_sq {
                let j = i + 1 + k;
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
            }
        }
        offset += n - i - 1;
    }
    let cluster_ms = ms(start);
    (neighbors, dist_ms, cluster_ms)
}

fn neighborhoods_rowwise(points: &PointSet, params: &DbscanParams) -> (Vec<Vec<u32>>, f64, f64) {
    let n = points.len();
    let eps_sq = params.eps_sq();
    let mut row = vec![0.0f64; n];
    let mut neighbors = Vec::with_capacity(n);
    let (mut dist_ms, mut cluster_ms) = (0.0, 0.0);
    for i in 0..n {
        let start = Instant::now();
        for (j, d) in row.iter_mut().enumerate() {
            *d = points.dist_sq(i, j);
        }
        dist_ms += ms(start);

        let start = Instant::now();
        let list: Vec<u32> = row
            .iter()
            .enumerate()
            .filter(|(_, &d)| d <= eps_sq)
            .map(|(j, _)| j as u32)
            .collect();
        neighbors.push(list);
        cluster_ms += ms(start);
    }
    (neighbors, dist_ms, cluster_ms)
}

fn merge_cores(neighbors: &[Vec<u32>], core: &[bool]) -> Vec<i64> {
    let n = neighbors.len();
    let mut labels = vec![NOISE; n];
    let mut next_id = 0;
    let mut queue = VecDeque::new();
    for seed in 0..n {
        if !core[seed] || labels[seed] != NOISE {
            continue;
        }
        labels[seed] = next_id;
        queue.push_back(seed);
        while let Some(c) = queue.pop_front() {
            for &q in &neighbors[c] {
                let q = q as usize;
                if core[q] && labels[q] == NOISE {
                    labels[q] = next_id;
                    queue.push_back(q);
                }
            }
        }
        next_id += 1;
    }
    for p in 0..n {
        if !core[p] {
            if let Some(&c) = neighbors[p].iter().find(|&&q| core[q as usize]) {
                labels[p] = labels[c as usize];
            }
        }
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(pts: Vec<[f64; 3]>, eps: f64, min_pts: usize) -> Vec<i64> {
        let ps = PointSet::new(pts).unwrap();
        let params = DbscanParams::new(eps, min_pts).unwrap();
        let (full, trace) = serial_dbscan_with(&ps, &params, OracleStorage::FullMatrix);
        let (rows, _) = serial_dbscan_with(&ps, &params, OracleStorage::RowBuffered);
        assert_eq!(full, rows);
        assert!(trace.dist_sq_ms >= 0.0 && trace.core_count <= ps.len());
        full.into_vec()
    }

    #[test]
    fn collinear_chain() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        assert_eq!(run(pts, 1.2, 2), vec![0, 0, 0]);
    }

    #[test]
    fn isolated_pair_is_noise() {
        assert_eq!(run(vec![[0.0; 3], [10.0, 0.0, 0.0]], 1.0, 2), vec![-1, -1]);
    }

    #[test]
    fn two_separated_groups() {
        let pts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [10.0, 0.0, 0.0],
            [11.0, 0.0, 0.0],
        ];
        assert_eq!(run(pts, 1.5, 2), vec![0, 0, 1, 1]);
    }

    #[test]
    fn border_joins_lowest_indexed_core() {
        // Point 0 is a border point between two dense groups; core 1 (left
        // group) has a lower index than core 4 (right group).
        let pts = vec![
            [0.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [-1.5, 0.0, 0.0],
            [-1.5, 0.3, 0.0],
            [1.0, 0.0, 0.0],
            [1.5, 0.0, 0.0],
            [1.5, 0.3, 0.0],
        ];
        let labels = run(pts, 1.05, 4);
        assert_eq!(labels, vec![0, 0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn single_point_min_pts_one() {
        assert_eq!(run(vec![[3.0, 3.0, 3.0]], 0.1, 1), vec![0]);
    }

    #[test]
    fn neighbors_include_self_and_boundary() {
        let ps = PointSet::new(vec![[0.0; 3], [3.0, 4.0, 0.0]]).unwrap();
        let p5 = DbscanParams::new(5.0, 1).unwrap();
        assert_eq!(brute_force_neighbors(&ps, 0, &p5).unwrap(), vec![0, 1]);
        let p499 = DbscanParams::new(4.99, 1).unwrap();
        assert_eq!(brute_force_neighbors(&ps, 0, &p499).unwrap(), vec![0]);
        assert!(matches!(
            brute_force_neighbors(&ps, 2, &p5),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }
}

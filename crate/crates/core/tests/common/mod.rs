#![allow(dead_code)]

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tiledscan::{generate_blobs, DbscanParams, PointSet};

pub const TAU: f64 = 1e-2;

/// Greedily keeps points whose squared distance to every kept point stays
/// more than `tau` away from `eps_sq`. Stops once `target` points are kept.
pub fn margin_filter(raw: &PointSet, eps_sq: f64, tau: f64, target: usize) -> Vec<[f64; 3]> {
    let mut kept: Vec<[f64; 3]> = Vec::with_capacity(target);
    for &p in raw.aos() {
        if kept.len() == target {
            break;
        }
        let ok = kept.iter().all(|q| {
            let d = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
            (d - eps_sq).abs() > tau
        });
        if ok {
            kept.push(p);
        }
    }
    kept
}

pub fn min_margin(points: &PointSet, eps_sq: f64) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min((points.dist_sq(i, j) - eps_sq).abs());
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub points: PointSet,
    pub params: DbscanParams,
    pub desc: String,
}

/// Recipe for a margin-respecting instance.
#[derive(Debug, Clone)]
pub struct MixSpec {
    pub target: usize,
    pub clusters: usize,
    pub eps: f64,
    /// Blob spread as a multiple of eps.
    pub spread_ratio: f64,
    pub noise: f64,
    pub min_pts: usize,
    pub seed: u64,
}

impl MixSpec {
    pub fn random(seed: u64, max_n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MixSpec {
            target: rng.random_range(1..=max_n),
            clusters: rng.random_range(1..=8),
            eps: rng.random_range(0.4..1.5),
            spread_ratio: rng.random_range(0.7..2.5),
            noise: rng.random_range(0.0..0.3),
            min_pts: rng.random_range(1..=12),
            seed: rng.random(),
        }
    }

    /// Blob/noise points filtered so every pairwise squared distance sits
    /// outside the `TAU` band around eps^2.
    pub fn build(&self) -> Instance {
        let k = self.clusters.min(self.target);
        let spread = self.eps * self.spread_ratio;
        let raw_n = self.target + self.target / 2 + k;
        let raw = generate_blobs(raw_n, k, spread, self.noise, self.seed).unwrap();
        let kept = margin_filter(&raw, self.eps * self.eps, TAU, self.target);
        let desc = format!(
            "n={} k={k} eps={:.3} spread={spread:.3} noise={:.2} min_pts={} seed={}",
            kept.len(),
            self.eps,
            self.noise,
            self.min_pts,
            self.seed
        );
        Instance {
            points: PointSet::new(kept).unwrap(),
            params: DbscanParams::new(self.eps, self.min_pts).unwrap(),
            desc,
        }
    }
}

/// Textbook DBSCAN: seeds a cluster at each unvisited core in index order
/// and expands breadth-first. Border points go to the lowest-index core
/// that reaches them, so the result is comparable point for point.
pub fn textbook_dbscan(points: &[[f64; 3]], eps: f64, min_pts: usize) -> Vec<i64> {
    let n = points.len();
    let d2 = |a: usize, b: usize| {
        let (p, q) = (points[a], points[b]);
        (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)
    };
    let nbrs: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| d2(i, j) <= eps * eps).collect())
        .collect();
    let core: Vec<bool> = nbrs.iter().map(|v| v.len() >= min_pts).collect();
    let mut label = vec![-1i64; n];
    let mut next = 0;
    for s in 0..n {
        if !core[s] || label[s] != -1 {
            continue;
        }
        label[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(c) = queue.pop_front() {
            for &q in &nbrs[c] {
                if core[q] && label[q] == -1 {
                    label[q] = next;
                    queue.push_back(q);
                }
            }
        }
        next += 1;
    }
    for i in 0..n {
        if !core[i] {
            if let Some(&c) = nbrs[i].iter().find(|&&c| core[c]) {
                label[i] = label[c];
            }
        }
    }
    label
}

/// Connected components by breadth-first search over an adjacency
/// predicate; returns a component id per vertex.
pub fn bfs_components(m: usize, adj: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut comp = vec![usize::MAX; m];
    let mut next = 0;
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut queue = VecDeque::from([s]);
        while let Some(a) = queue.pop_front() {
            for (b, slot) in comp.iter_mut().enumerate() {
                if *slot == usize::MAX && adj(a, b) {
                    *slot = next;
                    queue.push_back(b);
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn thread_counts() -> Vec<usize> {
    let mut t = vec![1, 4, tiledscan::available_threads()];
    t.sort_unstable();
    t.dedup();
    t
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

pub fn min(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

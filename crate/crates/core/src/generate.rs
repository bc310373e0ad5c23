//! Seeded synthetic datasets: Gaussian blobs on a lattice plus uniform
//! background noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::params::DbscanParams;
use crate::points::PointSet;

/// Places `k` blobs with per-axis standard deviation `spread` on a cubic
/// lattice whose spacing is at least `10 * spread` (and at least 1), then
/// adds `round(n * noise_fraction)` uniform points over the lattice's
/// bounding box. Output order is shuffled; identical arguments give
/// bitwise-identical output.
pub fn generate_blobs(
    n: usize,
    k: usize,
    spread: f64,
    noise_fraction: f64,
    seed: u64,
) -> Result<PointSet> {
    if k < 1 {
        return Err(Error::invalid("clusters", "need at least one blob"));
    }
    if n < k {
        return Err(Error::invalid(
            "n",
            format!("{n} points cannot fill {k} blobs"),
        ));
    }
    if !spread.is_finite() || spread < 0.0 {
        return Err(Error::invalid(
            "spread",
            format!("must be >= 0, got {spread}"),
        ));
    }
    if !(0.0..=1.0).contains(&noise_fraction) {
        return Err(Error::invalid(
            "noise",
            format!("fraction must lie in [0, 1], got {noise_fraction}"),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = lattice_centers(k, spread);
    let spacing = lattice_spacing(spread);

    let n_noise = ((n as f64 * noise_fraction).round() as usize).min(n);
    let n_blob = n - n_noise;

    let mut points = Vec::with_capacity(n);
    if spread > 0.0 {
        let normal = Normal::new(0.0, spread).expect("spread validated above");
        for i in 0..n_blob {
            let c = centers[i % k];
            points.push([
                c[0] + normal.sample(&mut rng),
                c[1] + normal.sample(&mut rng),
                c[2] + normal.sample(&mut rng),
            ]);
        }
    } else {
        points.extend((0..n_blob).map(|i| centers[i % k]));
    }

    let margin = (3.0 * spread).max(spacing / 2.0);
    let hi = centers
        .iter()
        .fold(0.0f64, |m, c| m.max(c[0]).max(c[1]).max(c[2]));
    for _ in 0..n_noise {
        points.push([
            rng.random_range(-margin..=hi + margin),
            rng.random_range(-margin..=hi + margin),
            rng.random_range(-margin..=hi + margin),
        ]);
    }

    points.shuffle(&mut rng);
    PointSet::new(points)
}

fn lattice_spacing(spread: f64) -> f64 {
    (10.0 * spread).max(1.0)
}

fn lattice_centers(k: usize, spread: f64) -> Vec<[f64; 3]> {
    let spacing = lattice_spacing(spread);
    let mut side = 1;
    while side * side * side < k {
        side += 1;
    }
    (0..k)
        .map(|c| {
            [
                (c % side) as f64 * spacing,
                ((c / side) % side) as f64 * spacing,
                (c / (side * side)) as f64 * spacing,
            ]
        })
        .collect()
}

/// Moves `eps` so that `eps^2` sits halfway between two multiples of
/// `grid^2`. On grid-snapped data every squared distance is such a
/// multiple, so no pair lies within `grid^2 / 2` of the boundary.
pub fn half_grid_eps(eps: f64, grid: f64) -> f64 {
    let cell = grid * grid;
    let m = (eps * eps / cell).floor();
    ((m + 0.5) * cell).sqrt()
}

/// The dataset recipe used by the benchmark report and the timing checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub n: usize,
    pub clusters: usize,
    pub spread: f64,
    pub noise: f64,
    pub seed: u64,
    /// Snap coordinates to this grid and align eps to a half-grid value.
    pub grid: Option<f64>,
    pub eps: f64,
    pub min_pts: usize,
}

impl Workload {
    pub fn standard(n: usize, seed: u64) -> Self {
        Workload {
            n,
            clusters: 8,
            spread: 2.0,
            noise: 0.05,
            seed,
            grid: Some(0.25),
            eps: 1.0,
            min_pts: 10,
        }
    }

    pub fn build(&self) -> Result<(PointSet, DbscanParams)> {
        let raw = generate_blobs(self.n, self.clusters, self.spread, self.noise, self.seed)?;
        match self.grid {
            Some(step) => {
                let params = DbscanParams::new(half_grid_eps(self.eps, step), self.min_pts)?;
                Ok((raw.snap_to_grid(step)?, params))
            }
            None => Ok((raw, DbscanParams::new(self.eps, self.min_pts)?)),
        }
    }
}

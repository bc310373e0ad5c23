//! Stage 3: merging primitive clusters (neighborhood rows of core points)
//! into final clusters.
//!
//! Two cores belong together iff a chain of cores links them with each
//! consecutive pair in range. Both backends label cores that way, then
//! attach each border point to the cluster of its lowest-indexed in-range
//! core, the same rule the serial oracle uses.

mod iterative;
mod warshall;

pub use iterative::{merge_iterative, merge_iterative_audited, MergeAudit, MergeState};
pub use warshall::{build_core_adjacency, merge_warshall, warshall_closure, CoreAdjacency};

use crate::error::{Error, Result};
use crate::kernels::{NeighborhoodMatrix, ValidVector};
use crate::labels::NOISE;

/// `valid` must be exactly the core flags implied by the row counts.
fn check_consistent(bits: &NeighborhoodMatrix, valid: &ValidVector) -> Result<()> {
    if bits.n() != valid.len() {
        return Err(Error::InconsistentInput(format!(
            "{} rows but {} valid flags",
            bits.n(),
            valid.len()
        )));
    }
    for (i, &count) in bits.neighbor_counts().iter().enumerate() {
        let core = count as usize >= valid.min_pts();
        if core != valid.is_valid(i) {
            return Err(Error::InconsistentInput(format!(
                "valid[{i}] = {} but point {i} has {count} neighbors (min_pts {})",
                valid.is_valid(i),
                valid.min_pts()
            )));
        }
    }
    Ok(())
}

/// Labels every non-core point from its lowest-indexed in-range core;
/// core labels must already be set.
fn attach_borders(bits: &NeighborhoodMatrix, core: &ValidVector, labels: &mut [i64]) {
    for p in 0..bits.n() {
        if core.is_valid(p) {
            continue;
        }
        let masked = bits
            .row_words(p)
            .iter()
            .zip(core.words())
            .map(|(r, c)| r & c);
        let first = masked
            .enumerate()
            .find(|(_, w)| *w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize);
        labels[p] = match first {
            Some(c) => labels[c],
            None => NOISE,
        };
    }
}

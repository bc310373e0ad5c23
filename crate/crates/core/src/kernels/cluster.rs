use rayon::prelude::*;

use super::arith::{direct_sq, doubled, hoisted_lhs, norm_sq};
use super::matrix::{words_for, DistSqMatrix, NeighborhoodMatrix, ValidVector};
use super::tile::{map_cols, pack_hits, pack_within, popcounts, Stage, ROW_BLOCK};
use super::{KernelVariant, VariantId};
use crate::budget::MemoryBudget;
use crate::error::{Error, Result};
use crate::params::DbscanParams;
use crate::points::PointSet;
use crate::workers;

fn finish(
    n: usize,
    words: Vec<u64>,
    min_pts: usize,
    threads: usize,
) -> (NeighborhoodMatrix, ValidVector) {
    let wpr = words_for(n);
    let counts = workers::install(threads, || {
        words
            .par_chunks(wpr * ROW_BLOCK)
            .flat_map_iter(|block| popcounts(block, wpr))
            .collect::<Vec<u32>>()
    });
    let valid = ValidVector::from_counts(&counts, min_pts);
    (NeighborhoodMatrix::from_words(n, words, counts), valid)
}

fn require(variant: &KernelVariant, id: VariantId, op: &str) -> Result<()> {
    if variant.id() == id {
        Ok(())
    } else {
        Err(Error::invalid(
            "variant",
            format!("{op} expects {id}, got {}", variant.id()),
        ))
    }
}

/// Thresholds a materialized distance matrix. Each worker owns whole rows,
/// so a row's neighbor count needs no cross-worker accumulation.
pub fn build_clusters_from_dist(
    dist: &DistSqMatrix,
    params: &DbscanParams,
    threads: usize,
) -> (NeighborhoodMatrix, ValidVector) {
    let n = dist.n();
    let wpr = words_for(n);
    let eps_sq = params.eps_sq_f32();
    let mut words = vec![0u64; n * wpr];
    workers::install(threads, || {
        words
            .par_chunks_mut(wpr)
            .zip(dist.values().par_chunks(n))
            .for_each_init(
                || vec![0u8; n],
                |hits, (row, d)| pack_within(row, 0, d, eps_sq, hits),
            );
    });
    finish(n, words, params.min_pts(), threads)
}

/// Distance and threshold in one sweep; only the bit matrix is written.
/// Equal to `build_clusters_from_dist(dist_tiled(..))` for the same tile
/// and unroll parameters.
pub fn fused_build(
    points: &PointSet,
    params: &DbscanParams,
    variant: &KernelVariant,
    threads: usize,
    budget: &MemoryBudget,
) -> Result<(NeighborhoodMatrix, ValidVector)> {
    require(variant, VariantId::Fused, "fused_build")?;
    let n = points.len();
    budget.check(MemoryBudget::packed_bytes(n))?;
    let wpr = words_for(n);
    let [xs, ys, zs] = points.soa_f32();
    let eps_sq = params.eps_sq_f32();
    let tile = variant.tile_size();
    let inner = variant.inner();
    let mut words = vec![0u64; n * wpr];

    workers::install(threads, || {
        words
            .par_chunks_mut(ROW_BLOCK * wpr)
            .enumerate()
            .for_each(|(b, block)| {
                let r0 = b * ROW_BLOCK;
                let rows = block.len() / wpr;
                let mut stage = Stage::with_capacity(tile);
                let mut scratch = vec![0f32; tile];
                let mut hits = vec![0u8; tile];
                for j0 in (0..n).step_by(tile) {
                    let j1 = (j0 + tile).min(n);
                    stage.load(&xs[j0..j1], &ys[j0..j1], &zs[j0..j1]);
                    let dist = &mut scratch[..j1 - j0];
                    for r in 0..rows {
                        let i = r0 + r;
                        let t = [xs[i], ys[i], zs[i]];
                        map_cols(
                            inner,
                            &stage.x,
                            &stage.y,
                            &stage.z,
                            &stage.x,
                            dist,
                            |x, y, z, _| direct_sq(t, [x, y, z]),
                        );
                        pack_within(
                            &mut block[r * wpr..(r + 1) * wpr],
                            j0,
                            dist,
                            eps_sq,
                            &mut hits,
                        );
                    }
                }
            });
    });
    Ok(finish(n, words, params.min_pts(), threads))
}

/// Fused build on the expanded form `T + P - (X px + Y py + Z pz)`.
///
/// Per row, `T`, `(X, Y, Z)` and `eps^2 - T` are hoisted; per staged tile,
/// `P[n]` and `eps^2 - P[n]` are computed once and shared by every row in
/// the block. The inner loop evaluates `P[n] - cross <= eps^2 - T` above
/// the diagonal and the mirrored `T - cross <= eps^2 - P[n]` below it, so
/// each unordered pair is decided by the same operands from both sides and
/// the matrix stays exactly symmetric. The diagonal is set directly.
///
/// Rounding differs from the direct form; bits agree with `fused_build`
/// for pairs whose squared distance is not within rounding error of
/// `eps^2`.
pub fn fused_build_algebraic(
    points: &PointSet,
    params: &DbscanParams,
    variant: &KernelVariant,
    threads: usize,
    budget: &MemoryBudget,
) -> Result<(NeighborhoodMatrix, ValidVector)> {
    require(variant, VariantId::FusedAlgebraic, "fused_build_algebraic")?;
    let n = points.len();
    budget.check(MemoryBudget::packed_bytes(n))?;
    let wpr = words_for(n);
    let [xs, ys, zs] = points.soa_f32();
    let eps_sq = params.eps_sq_f32();
    let tile = variant.tile_size();
    let inner = variant.inner();
    let mut words = vec![0u64; n * wpr];

    workers::install(threads, || {
        words
            .par_chunks_mut(ROW_BLOCK * wpr)
            .enumerate()
            .for_each(|(b, block)| {
                let r0 = b * ROW_BLOCK;
                let rows = block.len() / wpr;
                let mut stage = Stage::with_capacity(tile);
                let mut hits = vec![0u8; tile];
                for j0 in (0..n).step_by(tile) {
                    let j1 = (j0 + tile).min(n);
                    stage.load(&xs[j0..j1], &ys[j0..j1], &zs[j0..j1]);
                    stage.norm.clear();
                    stage.thr.clear();
                    for k in 0..stage.len() {
                        let p = norm_sq([stage.x[k], stage.y[k], stage.z[k]]);
                        stage.norm.push(p);
                        stage.thr.push(eps_sq - p);
                    }
                    let hits = &mut hits[..j1 - j0];
                    for r in 0..rows {
                        let i = r0 + r;
                        let t = [xs[i], ys[i], zs[i]];
                        let big_t = norm_sq(t);
                        let twice = doubled(t);
                        let row_thr = eps_sq - big_t;

                        // Columns before the row point, then after it.
                        let below = i.clamp(j0, j1) - j0;
                        let above = (i + 1).clamp(j0, j1) - j0;
                        let s = &stage;
                        map_cols(
                            inner,
                            &s.x[..below],
                            &s.y[..below],
                            &s.z[..below],
                            &s.thr[..below],
                            &mut hits[..below],
                            |x, y, z, thr| (hoisted_lhs(big_t, twice, [x, y, z]) <= thr) as u8,
                        );
                        if below < above {
                            hits[below] = 1;
                        }
                        map_cols(
                            inner,
                            &s.x[above..],
                            &s.y[above..],
                            &s.z[above..],
                            &s.norm[above..],
                            &mut hits[above..],
                            |x, y, z, p| (hoisted_lhs(p, twice, [x, y, z]) <= row_thr) as u8,
                        );
                        pack_hits(&mut block[r * wpr..(r + 1) * wpr], j0, hits);
                    }
                }
            });
    });
    Ok(finish(n, words, params.min_pts(), threads))
}

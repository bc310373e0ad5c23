use rayon::prelude::*;

use super::arith::direct_sq;
use super::matrix::DistSqMatrix;
use super::tile::{map_cols, Stage, ROW_BLOCK};
use super::{KernelVariant, VariantId};
use crate::budget::MemoryBudget;
use crate::error::{Error, Result};
use crate::points::PointSet;
use crate::workers;

fn allocate(n: usize, budget: &MemoryBudget) -> Result<Vec<f32>> {
    budget.check(MemoryBudget::materialized_bytes(n))?;
    Ok(vec![0f32; n * n])
}

/// One row per point, read from the point-major layout.
pub fn dist_baseline(
    points: &PointSet,
    threads: usize,
    budget: &MemoryBudget,
) -> Result<DistSqMatrix> {
    let n = points.len();
    let mut values = allocate(n, budget)?;
    let aos = points.aos_f32();
    workers::install(threads, || {
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let t = aos[i];
            for (out, &p) in row.iter_mut().zip(&aos) {
                *out = direct_sq(t, p);
            }
        });
    });
    Ok(DistSqMatrix::from_parts(n, values))
}

/// Same arithmetic as the baseline, streaming the coordinate-major arrays
/// so the inner loop walks each axis contiguously.
pub fn dist_soa(points: &PointSet, threads: usize, budget: &MemoryBudget) -> Result<DistSqMatrix> {
    let n = points.len();
    let mut values = allocate(n, budget)?;
    let [xs, ys, zs] = points.soa_f32();
    workers::install(threads, || {
        values.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let t = [xs[i], ys[i], zs[i]];
            for (((out, &x), &y), &z) in row.iter_mut().zip(&xs).zip(&ys).zip(&zs) {
                *out = direct_sq(t, [x, y, z]);
            }
        });
    });
    Ok(DistSqMatrix::from_parts(n, values))
}

/// Column dimension processed in tiles of `tile_size` points, each staged
/// once per row block and reused by every row in it. The row point is
/// held in locals for the whole sweep.
pub fn dist_tiled(
    points: &PointSet,
    variant: &KernelVariant,
    threads: usize,
    budget: &MemoryBudget,
) -> Result<DistSqMatrix> {
    if !matches!(variant.id(), VariantId::Tiled | VariantId::TiledUnrolled) {
        return Err(Error::invalid(
            "variant",
            format!("dist_tiled runs tiled variants, not {}", variant.id()),
        ));
    }
    let n = points.len();
    let mut values = allocate(n, budget)?;
    let [xs, ys, zs] = points.soa_f32();
    let tile = variant.tile_size();
    let inner = variant.inner();

    workers::install(threads, || {
        values
            .par_chunks_mut(ROW_BLOCK * n)
            .enumerate()
            .for_each(|(b, block)| {
                let r0 = b * ROW_BLOCK;
                let rows = block.len() / n;
                let mut stage = Stage::with_capacity(tile);
                for j0 in (0..n).step_by(tile) {
                    let j1 = (j0 + tile).min(n);
                    stage.load(&xs[j0..j1], &ys[j0..j1], &zs[j0..j1]);
                    for r in 0..rows {
                        let i = r0 + r;
                        let t = [xs[i], ys[i], zs[i]];
                        let out = &mut block[r * n + j0..r * n + j1];
                        map_cols(
                            inner,
                            &stage.x,
                            &stage.y,
                            &stage.z,
                            &stage.x,
                            out,
                            |x, y, z, _| direct_sq(t, [x, y, z]),
                        );
                    }
                }
            });
    });
    Ok(DistSqMatrix::from_parts(n, values))
}

//! Fixtures shared by the criterion benches.

use tiledscan::{
    fused_build, DbscanParams, MemoryBudget, NeighborhoodMatrix, PointSet, ValidVector, VariantId,
    Workload,
};

/// Grid-snapped blob workload of `n` points.
pub fn workload(n: usize) -> (PointSet, DbscanParams) {
    Workload::standard(n, 1)
        .build()
        .expect("standard workload builds")
}

/// Stage-two output for `n` points, ready to feed a merge backend.
pub fn neighborhoods(n: usize) -> (NeighborhoodMatrix, ValidVector) {
    let (points, params) = workload(n);
    fused_build(
        &points,
        &params,
        &VariantId::Fused.into(),
        tiledscan::available_threads(),
        &MemoryBudget::default(),
    )
    .expect("fits the default cap")
}

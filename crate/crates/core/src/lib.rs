//! Dense-matrix DBSCAN for 3D points, built as three data-parallel stages:
//!
//! 1. pairwise squared distances,
//! 2. the boolean neighborhood matrix and core flags,
//! 3. merging neighborhoods of mutually reachable cores.
//!
//! Stages 1-2 come in a ladder of kernel variants (see [`kernels`]) and
//! stage 3 in two backends (see [`merge`]). A plain serial implementation
//! in [`oracle`] is the reference every variant is checked against.
//!
//! ```
//! use tiledscan::{run_dbscan, DbscanParams, PipelineConfig, PointSet};
//!
//! let points = PointSet::new(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
//! let params = DbscanParams::new(1.2, 2).unwrap();
//! let (labels, _timings) = run_dbscan(&points, &params, &PipelineConfig::default()).unwrap();
//! assert_eq!(labels.as_slice(), &[0, 0, 0]);
//! ```

pub mod budget;
pub mod error;
pub mod generate;
pub mod kernels;
pub mod labels;
pub mod merge;
pub mod oracle;
pub mod params;
pub mod pipeline;
pub mod points;
mod workers;

pub use budget::{MemoryBudget, MEM_CAP_ENV};
pub use error::{Error, Result};
pub use generate::{generate_blobs, half_grid_eps, Workload};
pub use kernels::{
    build_clusters_from_dist, dist_baseline, dist_soa, dist_tiled, flop_count, fused_build,
    fused_build_algebraic, DistSqMatrix, DistanceFormula, KernelVariant, NeighborhoodMatrix,
    ValidVector, VariantId,
};
pub use labels::{canonicalize, load_labels, write_labels, Labeling, NOISE};
pub use merge::{
    build_core_adjacency, merge_iterative, merge_iterative_audited, merge_warshall,
    warshall_closure, CoreAdjacency, MergeAudit, MergeState,
};
pub use oracle::{
    brute_force_neighbors, serial_dbscan, serial_dbscan_with, OracleStorage, OracleTrace,
};
pub use params::{validate_params, DbscanParams};
pub use pipeline::{
    first_difference, labelings_equivalent, run_dbscan, MergeBackend, PipelineConfig, StageTimings,
};
pub use points::{load_points, parse_points, write_points, PointSet};
pub use workers::available_threads;

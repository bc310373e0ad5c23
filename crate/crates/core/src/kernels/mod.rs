//! Stage 1 (squared distances) and stage 2 (neighborhood matrix and core
//! flags) as a ladder of interchangeable variants.
//!
//! | variant           | layout | tiling | unrolled | fused | hoisted |
//! |-------------------|--------|--------|----------|-------|---------|
//! | `Baseline`        | AoS    |        |          |       |         |
//! | `Soa`             | SoA    |        |          |       |         |
//! | `Tiled`           | SoA    | yes    |          |       |         |
//! | `TiledUnrolled`   | SoA    | yes    | yes      |       |         |
//! | `Fused`           | SoA    | yes    | yes      | yes   |         |
//! | `FusedAlgebraic`  | SoA    | yes    | yes      | yes   | yes     |
//!
//! All kernels compute in `f32`. Work is split into disjoint row ranges;
//! each worker writes only its own rows, so results do not depend on the
//! worker count.

mod arith;
mod cluster;
mod distance;
mod matrix;
mod tile;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use arith::{
    count_flops, direct_sq, doubled, expanded_sq, flop_count, hoisted_lhs, norm_sq, Counted,
    DistanceFormula, KernelScalar,
};
pub use cluster::{build_clusters_from_dist, fused_build, fused_build_algebraic};
pub use distance::{dist_baseline, dist_soa, dist_tiled};
pub use matrix::{DistSqMatrix, NeighborhoodMatrix, ValidVector};

pub(crate) use matrix::{ones, words_for};
use tile::Inner;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantId {
    Baseline,
    Soa,
    Tiled,
    TiledUnrolled,
    Fused,
    FusedAlgebraic,
}

impl VariantId {
    pub const ALL: [VariantId; 6] = [
        VariantId::Baseline,
        VariantId::Soa,
        VariantId::Tiled,
        VariantId::TiledUnrolled,
        VariantId::Fused,
        VariantId::FusedAlgebraic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VariantId::Baseline => "baseline",
            VariantId::Soa => "soa",
            VariantId::Tiled => "tiled",
            VariantId::TiledUnrolled => "tiled-unrolled",
            VariantId::Fused => "fused",
            VariantId::FusedAlgebraic => "fused-algebraic",
        }
    }

    /// Whether the variant writes the full n x n distance matrix.
    pub fn materializes_distances(self) -> bool {
        !matches!(self, VariantId::Fused | VariantId::FusedAlgebraic)
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VariantId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        VariantId::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| Error::invalid("variant", format!("unknown variant `{s}`")))
    }
}

/// A kernel choice plus its blocking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelVariant {
    id: VariantId,
    tile_size: usize,
    unroll_width: usize,
}

impl KernelVariant {
    pub const DEFAULT_TILE: usize = 256;
    pub const DEFAULT_UNROLL: usize = 32;

    /// Requires `tile_size >= unroll_width >= 1`.
    pub fn new(id: VariantId, tile_size: usize, unroll_width: usize) -> Result<Self> {
        if unroll_width < 1 {
            return Err(Error::invalid("unroll_width", "must be at least 1"));
        }
        if tile_size < unroll_width {
            return Err(Error::invalid(
                "tile_size",
                format!("tile {tile_size} is smaller than unroll width {unroll_width}"),
            ));
        }
        Ok(KernelVariant {
            id,
            tile_size,
            unroll_width,
        })
    }

    pub fn id(&self) -> VariantId {
        self.id
    }

    pub fn tile_size(&self) -> usize {
        self.tile_size
    }

    pub fn unroll_width(&self) -> usize {
        self.unroll_width
    }

    pub(crate) fn inner(&self) -> Inner {
        match self.id {
            VariantId::Baseline | VariantId::Soa | VariantId::Tiled => Inner::Scalar,
            _ => Inner::Unrolled(self.unroll_width),
        }
    }
}

impl From<VariantId> for KernelVariant {
    fn from(id: VariantId) -> Self {
        KernelVariant {
            id,
            tile_size: Self::DEFAULT_TILE,
            unroll_width: Self::DEFAULT_UNROLL,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for v in VariantId::ALL {
            assert_eq!(v.name().parse::<VariantId>().unwrap(), v);
        }
        assert_eq!(
            "FUSED_ALGEBRAIC".parse::<VariantId>().unwrap(),
            VariantId::FusedAlgebraic
        );
        assert!("gpu".parse::<VariantId>().is_err());
    }

    #[test]
    fn variant_parameter_checks() {
        assert!(KernelVariant::new(VariantId::Tiled, 256, 32).is_ok());
        assert!(KernelVariant::new(VariantId::Tiled, 16, 32).is_err());
        assert!(KernelVariant::new(VariantId::Tiled, 16, 0).is_err());
        let d = KernelVariant::from(VariantId::Fused);
        assert_eq!((d.tile_size(), d.unroll_width()), (256, 32));
    }
}

//! Point storage and the plain-text point file format.
//!
//! A point file holds one point per line as `x y z` or `x,y,z`. Blank
//! lines and lines whose first non-blank character is `#` are ignored.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Coordinate-major mirror of a point set: one contiguous array per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordColumns {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

/// A non-empty set of finite 3D points, held in both point-major and
/// coordinate-major layout. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    aos: Vec<[f64; 3]>,
    soa: CoordColumns,
}

impl PointSet {
    pub fn new(points: Vec<[f64; 3]>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::invalid(
                "points",
                format!("point {i} has a non-finite coordinate"),
            ));
        }
        let soa = CoordColumns {
            x: points.iter().map(|p| p[0]).collect(),
            y: points.iter().map(|p| p[1]).collect(),
            z: points.iter().map(|p| p[2]).collect(),
        };
        Ok(PointSet { aos: points, soa })
    }

    pub fn len(&self) -> usize {
        self.aos.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.aos.is_empty()
    }

    pub fn point(&self, i: usize) -> [f64; 3] {
        self.aos[i]
    }

    pub fn aos(&self) -> &[[f64; 3]] {
        &self.aos
    }

    pub fn soa(&self) -> &CoordColumns {
        &self.soa
    }

    /// Squared Euclidean distance in full precision.
    pub fn dist_sq(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.aos[i], self.aos[j]);
        let dx = a[0] - b[0];
        let dy = a[1] - b[1];
        let dz = a[2] - b[2];
        dx * dx + dy * dy + dz * dz
    }

    /// Point-major copy narrowed to kernel precision.
    pub fn aos_f32(&self) -> Vec<[f32; 3]> {
        self.aos
            .iter()
            .map(|p| [p[0] as f32, p[1] as f32, p[2] as f32])
            .collect()
    }

    /// Coordinate-major copy narrowed to kernel precision.
    pub fn soa_f32(&self) -> [Vec<f32>; 3] {
        let narrow = |v: &[f64]| v.iter().map(|&c| c as f32).collect::<Vec<f32>>();
        [
            narrow(&self.soa.x),
            narrow(&self.soa.y),
            narrow(&self.soa.z),
        ]
    }

    /// Rounds every coordinate to the nearest multiple of `step`.
    ///
    /// With a power-of-two step and moderate magnitudes every squared
    /// distance becomes exactly representable in 32-bit arithmetic.
    pub fn snap_to_grid(&self, step: f64) -> Result<PointSet> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::invalid(
                "grid",
                format!("step must be positive, got {step}"),
            ));
        }
        let snapped = self
            .aos
            .iter()
            .map(|p| p.map(|c| (c / step).round() * step))
            .collect();
        PointSet::new(snapped)
    }
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 3 {
            let token = fields.get(3).copied().unwrap_or(line);
            return Err(Error::Parse {
                line: line_no,
                token: token.to_string(),
            });
        }
        let mut p = [0.0; 3];
        for (slot, field) in p.iter_mut().zip(&fields) {
            *slot = match field.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        token: field.to_string(),
                    })
                }
            };
        }
        points.push(p);
    }
    PointSet::new(points)
}

pub fn load_points(path: impl AsRef<Path>) -> Result<PointSet> {
    let text = fs::read_to_string(path)?;
    parse_points(&text)
}

/// Writes `x y z` per line using shortest round-trip formatting, so
/// `load_points` reads back identical values.
pub fn write_points(points: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for p in points.aos() {
        writeln!(out, "{} {} {}", p[0], p[1], p[2])?;
    }
    out.flush()?;
    Ok(())
}

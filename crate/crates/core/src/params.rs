use crate::error::{Error, Result};

/// Neighborhood radius and core-point threshold.
///
/// `eps_sq` is computed once at construction; every comparison in the
/// crate is against the squared radius, inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanParams {
    eps: f64,
    eps_sq: f64,
    min_pts: usize,
}

impl DbscanParams {
    pub fn new(eps: f64, min_pts: usize) -> Result<Self> {
        validate_params(eps, min_pts)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps_sq(&self) -> f64 {
        self.eps_sq
    }

    /// Squared radius narrowed to kernel precision.
    pub fn eps_sq_f32(&self) -> f32 {
        self.eps_sq as f32
    }

    /// Neighborhood size (self included) at which a point becomes core.
    pub fn min_pts(&self) -> usize {
        self.min_pts
    }
}

pub fn validate_params(eps: f64, min_pts: usize) -> Result<DbscanParams> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::invalid(
            "eps",
            format!("must be positive and finite, got {eps}"),
        ));
    }
    let eps_sq = eps * eps;
    if !eps_sq.is_finite() {
        return Err(Error::invalid(
            "eps",
            format!("{eps} overflows when squared"),
        ));
    }
    if min_pts < 1 {
        return Err(Error::invalid("min_pts", "must be at least 1"));
    }
    Ok(DbscanParams {
        eps,
        eps_sq,
        min_pts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caches_squared_radius() {
        let p = validate_params(1.5, 4).unwrap();
        assert_eq!(p.eps(), 1.5);
        assert_eq!(p.eps_sq(), 2.25);
        assert_eq!(p.min_pts(), 4);
    }

    #[test]
    fn rejects_bad_fields() {
        for eps in [0.0, -1.0, f64::NAN, f64::INFINITY, 1e200] {
            match validate_params(eps, 4) {
                Err(Error::InvalidParams { field, .. }) => assert_eq!(field, "eps"),
                other => panic!("eps={eps}: {other:?}"),
            }
        }
        match validate_params(2.0, 0) {
            Err(Error::InvalidParams { field, .. }) => assert_eq!(field, "min_pts"),
            other => panic!("{other:?}"),
        }
    }
}

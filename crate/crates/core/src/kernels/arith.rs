//! Per-pair distance arithmetic shared by every kernel.
//!
//! The kernels call these generic functions with `f32`; the flop counter
//! calls the very same functions with an instrumented scalar, so the
//! reported counts describe the code that actually runs.

use std::cell::Cell;
use std::ops::{Add, Mul, Sub};

pub trait KernelScalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl KernelScalar for f32 {}
impl KernelScalar for f64 {}

/// `(tx-px)^2 + (ty-py)^2 + (tz-pz)^2`, accumulated x, then y, then z.
#[inline(always)]
pub fn direct_sq<S: KernelScalar>(t: [S; 3], p: [S; 3]) -> S {
    let dx = t[0] - p[0];
    let dy = t[1] - p[1];
    let dz = t[2] - p[2];
    dx * dx + dy * dy + dz * dz
}

/// `x^2 + y^2 + z^2`; the row norm `T` and the column norm `P[n]`.
#[inline(always)]
pub fn norm_sq<S: KernelScalar>(p: [S; 3]) -> S {
    p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
}

/// `(2tx, 2ty, 2tz)`, hoisted once per row.
#[inline(always)]
pub fn doubled<S: KernelScalar>(t: [S; 3]) -> [S; 3] {
    [t[0] + t[0], t[1] + t[1], t[2] + t[2]]
}

/// Inner-loop body of the hoisted form: `lead - (X px + Y py + Z pz)`.
///
/// Compared against a hoisted threshold `eps^2 - T`, this decides
/// `T + P - cross <= eps^2` with six operations per pair.
#[inline(always)]
pub fn hoisted_lhs<S: KernelScalar>(lead: S, twice_t: [S; 3], p: [S; 3]) -> S {
    lead - (twice_t[0] * p[0] + twice_t[1] * p[1] + twice_t[2] * p[2])
}

/// Full expanded distance `T + P - (X px + Y py + Z pz)`.
pub fn expanded_sq<S: KernelScalar>(t: [S; 3], p: [S; 3]) -> S {
    let big_t = norm_sq(t);
    let big_p = norm_sq(p);
    let twice = doubled(t);
    big_t + big_p - (twice[0] * p[0] + twice[1] * p[1] + twice[2] * p[2])
}

thread_local! {
    static FLOPS: Cell<u64> = const { Cell::new(0) };
}

/// Scalar that counts every arithmetic operation performed on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counted(pub f64);

impl Counted {
    fn tick() {
        FLOPS.with(|c| c.set(c.get() + 1));
    }
}

impl Add for Counted {
    type Output = Counted;
    fn add(self, rhs: Counted) -> Counted {
        Counted::tick();
        Counted(self.0 + rhs.0)
    }
}

impl Sub for Counted {
    type Output = Counted;
    fn sub(self, rhs: Counted) -> Counted {
        Counted::tick();
        Counted(self.0 - rhs.0)
    }
}

impl Mul for Counted {
    type Output = Counted;
    fn mul(self, rhs: Counted) -> Counted {
        Counted::tick();
        Counted(self.0 * rhs.0)
    }
}

impl KernelScalar for Counted {}

/// Runs `f` and returns how many `Counted` operations it executed on the
/// current thread.
pub fn count_flops<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = FLOPS.with(Cell::get);
    let r = f();
    (r, FLOPS.with(Cell::get) - before)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceFormula {
    /// Subtract, square and sum per pair.
    Direct,
    /// Hoisted form: only the per-pair work left after moving row and
    /// column terms out of the loop.
    AlgebraicInner,
}

/// Floating-point operations per inner-loop evaluation, measured by
/// executing the kernel arithmetic once on instrumented scalars.
pub fn flop_count(formula: DistanceFormula) -> u64 {
    let t = [Counted(0.3), Counted(-1.2), Counted(2.5)];
    let p = [Counted(1.7), Counted(0.4), Counted(-0.9)];
    match formula {
        DistanceFormula::Direct => count_flops(|| direct_sq(t, p)).1,
        DistanceFormula::AlgebraicInner => {
            // Row and tile terms are prepared outside the measured region.
            let lead = norm_sq(p);
            let twice = doubled(t);
            count_flops(|| hoisted_lhs(lead, twice, p)).1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flop_counts() {
        assert_eq!(flop_count(DistanceFormula::Direct), 8);
        assert_eq!(flop_count(DistanceFormula::AlgebraicInner), 6);
        // The literal expanded form needs one more addition.
        let t = [Counted(1.0), Counted(2.0), Counted(3.0)];
        let p = [Counted(4.0), Counted(6.0), Counted(3.0)];
        let big_t = norm_sq(t);
        let big_p = norm_sq(p);
        let twice = doubled(t);
        let (_, n) =
            count_flops(|| big_t + big_p - (twice[0] * p[0] + twice[1] * p[1] + twice[2] * p[2]));
        assert_eq!(n, 7);
    }

    #[test]
    fn expanded_form_hand_checks() {
        assert_eq!(expanded_sq([0.0f32, 0.0, 0.0], [3.0, 4.0, 0.0]), 25.0);
        assert_eq!(norm_sq([1.0f64, 2.0, 3.0]), 14.0);
        assert_eq!(norm_sq([4.0f64, 6.0, 3.0]), 61.0);
        assert_eq!(expanded_sq([1.0f64, 2.0, 3.0], [4.0, 6.0, 3.0]), 25.0);
        assert_eq!(direct_sq([1.0f64, 2.0, 3.0], [4.0, 6.0, 3.0]), 25.0);
    }

    #[test]
    fn hoisted_comparison_matches_expanded() {
        let t = [1.0f64, 2.0, 3.0];
        let p = [4.0f64, 6.0, 3.0];
        let eps_sq = 25.0;
        // P - cross <= eps^2 - T  <=>  T + P - cross <= eps^2
        assert!(hoisted_lhs(norm_sq(p), doubled(t), p) <= eps_sq - norm_sq(t));
        assert!(hoisted_lhs(norm_sq(p), doubled(t), p) > (eps_sq - 0.5) - norm_sq(t));
    }
}

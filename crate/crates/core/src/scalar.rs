//! Scalar abstraction: one trait alias for "a real floating type we can run
//! the whole pipeline on", plus the complex counterpart the eigensolvers need.
//!
//! Everything downstream is written against [`Real`] so the same code
//! instantiates at f32 and f64. Tolerances are *methods* of the scalar rather
//! than free constants: a residual that is comfortably converged at f64 is
//! unreachable at f32, so each threshold scales with the epsilon of the type.

use std::iter::Sum;

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the library is generic over.
///
/// The supertraits cover field arithmetic, elementary functions, ordering and
/// conversions; the inherent items add literal injection (`of`, `of_usize`)
/// and the per-type tolerances used by validators across the crate.
pub trait Real:
    RealField + EigenScalar<Re = Self> + FromPrimitive + ToPrimitive + Copy + Default + Sum<Self>
{
    /// Inject an f64 literal. Panics only if the target type cannot represent
    /// any finite f64 at all, which none of the provided impls do.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal must convert")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must convert to the scalar type")
    }

    fn of_i64(n: i64) -> Self {
        Self::from_i64(n).expect("i64 must convert to the scalar type")
    }

    /// Convert to f64 for reporting (certificates, CSV rows).
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }

    /// Tolerance for unit-norm and orthonormality checks.
    fn unit_norm_tol() -> Self;

    /// Tolerance below which two observable eigenvalues are the same sector.
    fn merge_tol() -> Self;

    /// Hermiticity defect allowed in an interaction block.
    fn hermiticity_tol() -> Self;

    /// Smallest branch weight a split may carry before it counts as one-sided.
    fn split_floor() -> Self;

    /// Default relative residual target for the iterative eigensolver.
    fn eigen_tol() -> Self;
}

impl Real for f64 {
    fn unit_norm_tol() -> Self {
        1e-12
    }
    fn merge_tol() -> Self {
        1e-12
    }
    fn hermiticity_tol() -> Self {
        1e-12
    }
    fn split_floor() -> Self {
        1e-15
    }
    fn eigen_tol() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn unit_norm_tol() -> Self {
        1e-5
    }
    fn merge_tol() -> Self {
        1e-5
    }
    fn hermiticity_tol() -> Self {
        1e-5
    }
    fn split_floor() -> Self {
        1e-7
    }
    fn eigen_tol() -> Self {
        1e-4
    }
}

/// Scalar a Hermitian eigenproblem can be posed over: the real types
/// themselves (symmetric problems) and their complex extensions.
///
/// The four impls are spelled out rather than blanket-derived so that `f64`
/// and `Complex<f64>` can coexist without coherence clashes.
pub trait EigenScalar: ComplexField {
    /// The underlying real type.
    type Re: RealField + Copy;

    /// Build from real and imaginary parts given as f64.
    fn from_re_im(re: f64, im: f64) -> Self;

    /// True if the type discards imaginary parts (i.e. is a real type).
    const IS_REAL: bool;
}

impl EigenScalar for f64 {
    type Re = f64;
    fn from_re_im(re: f64, _im: f64) -> Self {
        re
    }
    const IS_REAL: bool = true;
}

impl EigenScalar for f32 {
    type Re = f32;
    fn from_re_im(re: f64, _im: f64) -> Self {
        re as f32
    }
    const IS_REAL: bool = true;
}

impl EigenScalar for Complex<f64> {
    type Re = f64;
    fn from_re_im(re: f64, im: f64) -> Self {
        Complex::new(re, im)
    }
    const IS_REAL: bool = false;
}

impl EigenScalar for Complex<f32> {
    type Re = f32;
    fn from_re_im(re: f64, im: f64) -> Self {
        Complex::new(re as f32, im as f32)
    }
    const IS_REAL: bool = false;
}

/// Neumaier-compensated summation. Used wherever a long sum feeds a
/// tolerance check (probability totals, log-factorial tables) so the check
/// tests the quantity, not the accumulation order.
pub fn compensated_sum<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_injection_round_trips() {
        assert_eq!(f64::of(0.5), 0.5);
        assert_eq!(f32::of(0.5), 0.5f32);
        assert_eq!(f64::of_usize(41), 41.0);
        assert_eq!(f64::of_i64(-3), -3.0);
    }

    #[test]
    fn compensated_sum_beats_naive_on_ill_ordered_input() {
        // 1 + 1e-16 repeated: naive f64 summation loses every small term.
        let mut xs = vec![1.0f64];
        xs.extend(std::iter::repeat_n(1e-16, 10_000));
        let total = compensated_sum(xs.iter().copied());
        let expected = 1.0 + 1e-12;
        assert!(
            (total - expected).abs() < 1e-15,
            "compensated sum drifted: got {total:.17}, want {expected:.17}"
        );
    }

    #[test]
    fn f32_tolerances_are_coarser_than_f64() {
        assert!(f32::unit_norm_tol() as f64 > f64::unit_norm_tol());
        assert!(f32::eigen_tol() as f64 > f64::eigen_tol());
    }
}

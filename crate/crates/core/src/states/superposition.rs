//! Superpositions of a handful of Dicke levels, ψ = Σ_k (±1)^k c_k |j,−n+2k⟩
//! with Σ|c_k|² = 1 and Σ c_k = 0, and their measurement statistics in the
//! rotated collective basis.
//!
//! The zero-sum constraint is what kills the leading √(2/πj) term of every
//! overlap, so the weight near the ladder midpoint decays like j^{−3} instead
//! of j^{−1} — the whole point of this family.
//!
//! Both signs share one distribution kernel: the +-family differs from the
//! −-family by a rotation about z, whose phases e^{−iπk} fold (+1)^k into
//! (−1)^k. Only which observable is being measured (Ĵ_y versus Ĵ_x)
//! changes, never the probabilities.

use std::fmt;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::halfint::HalfInt;
use crate::scalar::{compensated_sum, Real};
use crate::states::dicke::DickeVector;
use crate::states::wigner::wigner_d_row;
use crate::{Cplx, Result};

/// Which of the two sign patterns (±1)^k the superposition carries; the +
/// pattern pairs with Ĵ_y as the distinguishing observable, the − pattern
/// with Ĵ_x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A validated coefficient list: unit weight and zero sum.
#[derive(Clone, Debug)]
pub struct DickeSuperpositionSpec<T: Real> {
    sign: Sign,
    coefficients: Vec<Cplx<T>>,
}

impl<T: Real> DickeSuperpositionSpec<T> {
    pub fn new(sign: Sign, coefficients: Vec<Cplx<T>>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidSpec(
                "a superposition needs at least two coefficients".into(),
            ));
        }
        let weight = compensated_sum(coefficients.iter().map(|c| c.norm_sqr()));
        if (weight - T::one()).abs() > T::unit_norm_tol() {
            return Err(Error::InvalidSpec(format!(
                "coefficients must carry unit weight, Σ|c|² = {}",
                weight.as_f64()
            )));
        }
        let sum_re = compensated_sum(coefficients.iter().map(|c| c.re));
        let sum_im = compensated_sum(coefficients.iter().map(|c| c.im));
        if (sum_re * sum_re + sum_im * sum_im).sqrt() > T::unit_norm_tol() {
            return Err(Error::InvalidSpec(format!(
                "coefficients must sum to zero, got {} + {}i",
                sum_re.as_f64(),
                sum_im.as_f64()
            )));
        }
        Ok(DickeSuperpositionSpec { sign, coefficients })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn coefficients(&self) -> &[Cplx<T>] {
        &self.coefficients
    }

    /// The spread index n: levels run m = −n, −n+2, …, n.
    pub fn n(&self) -> usize {
        self.coefficients.len() - 1
    }

    fn check_j(&self, j: HalfInt) -> Result<()> {
        let n = HalfInt::from_int(self.n() as i64);
        if !j.is_integer() || j < n {
            return Err(Error::InvalidParameter(format!(
                "need an integer j ≥ n = {n}, got j = {j}"
            )));
        }
        Ok(())
    }

    /// The state Σ_k (±1)^k c_k |j,−n+2k⟩ in the collective basis.
    pub fn state_vector(&self, j: HalfInt) -> Result<DickeVector<T>> {
        self.check_j(j)?;
        let dim = (j + j).as_int().unwrap() as usize + 1;
        let n = self.n() as i64;
        let mut amplitudes = DVector::zeros(dim);
        for (k, &c) in self.coefficients.iter().enumerate() {
            let m = HalfInt::from_int(2 * k as i64 - n);
            let idx = (m + j).as_int().unwrap() as usize;
            let flip = self.sign == Sign::Minus && k % 2 == 1;
            amplitudes[idx] = if flip { -c } else { c };
        }
        DickeVector::new(j, amplitudes)
    }

    /// Measurement distribution of the matching rotated observable:
    /// p_m = |Σ_k (−1)^k c_k d^j_{−n+2k,m}(π/2)|², ascending in m.
    /// The same kernel serves both signs (see the module docs).
    pub fn distribution(&self, j: HalfInt) -> Result<Vec<(HalfInt, T)>> {
        self.check_j(j)?;
        let ms = HalfInt::projection_range(j);
        let n = self.n() as i64;
        let quarter_turn = T::of(std::f64::consts::FRAC_PI_2);
        let mut overlaps: Vec<Cplx<T>> = vec![Cplx::new(T::zero(), T::zero()); ms.len()];
        for (k, &c) in self.coefficients.iter().enumerate() {
            let m_row = HalfInt::from_int(2 * k as i64 - n);
            let row = wigner_d_row::<T>(j, m_row, quarter_turn)?;
            let factor = if k % 2 == 1 { -c } else { c };
            for (acc, d) in overlaps.iter_mut().zip(row) {
                *acc += factor * Cplx::new(d, T::zero());
            }
        }
        Ok(ms.into_iter().zip(overlaps.into_iter().map(|z| z.norm_sqr())).collect())
    }
}

/// Inclusive weight of a ladder distribution within `half_width` of `center`
/// (with the usual tolerance slack on the boundary).
pub fn weight_within<T: Real>(dist: &[(HalfInt, T)], center: T, half_width: T) -> T {
    let slack = half_width + T::merge_tol();
    compensated_sum(dist.iter().filter_map(|&(m, p)| {
        ((m.value::<T>() - center).abs() <= slack).then_some(p)
    }))
}

/// Mean and variance of a ladder distribution.
pub fn moments<T: Real>(dist: &[(HalfInt, T)]) -> (T, T) {
    let mean = compensated_sum(dist.iter().map(|&(m, p)| m.value::<T>() * p));
    let var = compensated_sum(dist.iter().map(|&(m, p)| {
        let d = m.value::<T>() - mean;
        d * d * p
    }));
    (mean, var)
}

/// Serialisable form: coefficients as `[re, im]` pairs plus the sign.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuperpositionConfig {
    pub sign: Sign,
    pub coefficients: Vec<[f64; 2]>,
}

impl SuperpositionConfig {
    pub fn to_spec<T: Real>(&self) -> Result<DickeSuperpositionSpec<T>> {
        let coefficients = self
            .coefficients
            .iter()
            .map(|&[re, im]| Cplx::new(T::of(re), T::of(im)))
            .collect();
        DickeSuperpositionSpec::new(self.sign, coefficients)
    }
}

impl<T: Real> DickeSuperpositionSpec<T> {
    pub fn to_config(&self) -> SuperpositionConfig {
        SuperpositionConfig {
            sign: self.sign,
            coefficients: self
                .coefficients
                .iter()
                .map(|c| [c.re.as_f64(), c.im.as_f64()])
                .collect(),
        }
    }
}

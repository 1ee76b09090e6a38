//! Superpositions of two product states, |φ₁⟩^⊗N + e^{iα}|φ₂⟩^⊗N, normalised.
//!
//! The per-site overlap modulus ω = |⟨φ₂|φ₁⟩| is the quantity every estimate
//! downstream feeds on: the branch overlap λ = ⟨φ₂|φ₁⟩^N dies like ω^N, and
//! matrix elements of K-local terms between the branches inherit a factor
//! ω^{N−K}. We therefore keep ω and λ on the struct next to the assembled
//! state instead of recomputing them from 2^N amplitudes.

use nalgebra::DVector;

use crate::basis::{ManyBodySpace, SiteSpace};
use crate::error::Error;
use crate::scalar::Real;
use crate::{Cplx, Result, State};

/// A normalised two-branch product superposition together with the overlap
/// data of its branches.
#[derive(Clone, Debug)]
pub struct ProductSuperposition<T: Real> {
    state: State<T>,
    lambda: Cplx<T>,
    omega: T,
}

impl<T: Real> ProductSuperposition<T> {
    /// The normalised superposition in the full product basis.
    pub fn state(&self) -> &State<T> {
        &self.state
    }

    /// Branch overlap λ = ⟨φ₂|φ₁⟩^N.
    pub fn lambda(&self) -> Cplx<T> {
        self.lambda
    }

    /// Per-site overlap modulus ω = |⟨φ₂|φ₁⟩|.
    pub fn omega(&self) -> T {
        self.omega
    }
}

fn check_site_vector<T: Real>(phi: &DVector<Cplx<T>>) -> Result<()> {
    let norm = phi.dotc(phi).re.sqrt();
    if (norm - T::one()).abs() > T::unit_norm_tol() {
        return Err(Error::Unnormalized {
            norm: norm.as_f64(),
            tol: T::unit_norm_tol().as_f64(),
        });
    }
    Ok(())
}

/// |φ⟩^⊗N in the little-endian product basis (site 0 is the fastest digit).
pub fn product_state<T: Real>(n_sites: usize, phi: &DVector<Cplx<T>>) -> Result<State<T>> {
    let space = ManyBodySpace::new(n_sites, SiteSpace::new(phi.len())?)?;
    check_site_vector(phi)?;
    let mut acc = DVector::from_element(1, Cplx::new(T::one(), T::zero()));
    for _ in 0..n_sites {
        acc = phi.kronecker(&acc);
    }
    debug_assert_eq!(acc.len(), space.dim());
    Ok(acc)
}

/// Build (|φ₁⟩^⊗N + e^{iα}|φ₂⟩^⊗N)/‖·‖. The site vectors must be unit
/// vectors of equal dimension with |⟨φ₂|φ₁⟩| strictly below 1 — identical
/// branches leave nothing to superpose.
pub fn ghz_state<T: Real>(
    n_sites: usize,
    phi1: &DVector<Cplx<T>>,
    phi2: &DVector<Cplx<T>>,
    alpha: T,
) -> Result<ProductSuperposition<T>> {
    if phi1.len() != phi2.len() {
        return Err(Error::DimensionMismatch {
            expected: phi1.len(),
            got: phi2.len(),
        });
    }
    let site_overlap = phi2.dotc(phi1);
    let omega = site_overlap.norm_sqr().sqrt();
    if omega >= T::one() - T::unit_norm_tol() {
        return Err(Error::OverlapTooLarge {
            overlap: omega.as_f64(),
        });
    }
    let v1 = product_state(n_sites, phi1)?;
    let v2 = product_state(n_sites, phi2)?;
    let mut lambda = Cplx::new(T::one(), T::zero());
    for _ in 0..n_sites {
        lambda *= site_overlap;
    }
    let phase = Cplx::new(alpha.cos(), alpha.sin());
    let mut state = v1;
    state.axpy(phase, &v2, Cplx::new(T::one(), T::zero()));
    // ‖ψ₁ + e^{iα}ψ₂‖² = 2 + 2 Re(e^{iα}⟨ψ₁|ψ₂⟩); strictly positive since
    // |λ| < 1 was enforced above.
    let norm = state.dotc(&state).re.sqrt();
    state *= Cplx::new(T::one() / norm, T::zero());
    Ok(ProductSuperposition { state, lambda, omega })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_state;

    fn ket(entries: &[(f64, f64)]) -> DVector<Cplx<f64>> {
        DVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| Cplx::new(re, im)))
    }

    #[test]
    fn three_qubit_corner_superposition() {
        let down = ket(&[(1.0, 0.0), (0.0, 0.0)]);
        let up = ket(&[(0.0, 0.0), (1.0, 0.0)]);
        let ghz = ghz_state(3, &down, &up, 0.0).unwrap();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        let state = ghz.state();
        assert_eq!(state.len(), 8);
        assert!((state[0].re - amp).abs() < 1e-15, "|000⟩ amplitude {}", state[0]);
        assert!((state[7].re - amp).abs() < 1e-15, "|111⟩ amplitude {}", state[7]);
        for i in 1..7 {
            assert_eq!(state[i], Cplx::new(0.0, 0.0), "index {i} should stay empty");
        }
        assert_eq!(ghz.lambda(), Cplx::new(0.0, 0.0));
        assert_eq!(ghz.omega(), 0.0);
    }

    #[test]
    fn site_overlap_powers_into_lambda() {
        let phi1 = ket(&[(1.0, 0.0), (0.0, 0.0)]);
        let phi2 = ket(&[(0.8, 0.0), (0.0, 0.6)]);
        let ghz = ghz_state(10, &phi1, &phi2, 0.0).unwrap();
        assert!((ghz.omega() - 0.8).abs() < 1e-15);
        let expected = 0.8f64.powi(10);
        assert!(
            (ghz.lambda().norm_sqr().sqrt() - expected).abs() < 1e-14,
            "|λ| = {} should be ω^10 = {expected}",
            ghz.lambda().norm_sqr().sqrt()
        );
    }

    #[test]
    fn dense_overlaps_confirm_the_bookkeeping() {
        // Random three-level sites, six of them, and a nontrivial phase. The
        // oracle works on the assembled 3^6 vectors and never uses ω or the
        // powered λ.
        let phi1 = random_state::<f64>(3, 11);
        let phi2 = random_state::<f64>(3, 12);
        let alpha = 0.7;
        let ghz = ghz_state(6, &phi1, &phi2, alpha).unwrap();

        let v1 = product_state(6, &phi1).unwrap();
        let v2 = product_state(6, &phi2).unwrap();
        let dense_lambda = v2.dotc(&v1);
        assert!(
            (ghz.lambda() - dense_lambda).norm_sqr().sqrt() < 1e-12,
            "powered λ {} vs dense {}",
            ghz.lambda(),
            dense_lambda
        );
        assert!((ghz.state().dotc(ghz.state()).re - 1.0).abs() < 1e-12);

        // Undo the normalisation and compare against the raw combination.
        let phase = Cplx::new(alpha.cos(), alpha.sin());
        let norm_sq = 2.0 + 2.0 * (phase * dense_lambda.conj()).re;
        let mut raw = v1.clone();
        raw.axpy(phase, &v2, Cplx::new(1.0, 0.0));
        let rebuilt = ghz.state() * Cplx::new(norm_sq.sqrt(), 0.0);
        assert!((rebuilt - raw).norm() < 1e-12);
    }

    #[test]
    fn degenerate_and_malformed_inputs_are_rejected() {
        let phi = ket(&[(0.6, 0.0), (0.8, 0.0)]);
        assert!(matches!(
            ghz_state(4, &phi, &phi, 0.3),
            Err(Error::OverlapTooLarge { .. })
        ));
        let other = ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        assert!(matches!(
            ghz_state(2, &phi, &other, 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
        let long = ket(&[(1.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(
            ghz_state(2, &long, &long, 0.0),
            Err(Error::OverlapTooLarge { .. }) | Err(Error::Unnormalized { .. })
        ));
        assert!(product_state(2, &long).is_err());
    }
}

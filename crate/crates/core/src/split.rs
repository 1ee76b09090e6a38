//! Cutting a state into two branches at a separation point of an additive
//! observable: ψ = a₁ψ₁ + a₂ψ₂, with ψ₁ supported on sectors strictly below
//! the cut and ψ₂ on sectors at or above it. Because the branches live on
//! disjoint basis states their overlap is exactly zero — not merely small —
//! and that exactness is what the sector-window bounds in [`crate::bounds`]
//! rely on.

use crate::basis::{SectorDistribution, SectorIndex};
use crate::error::Error;
use crate::scalar::Real;
use crate::{Cplx, Result, State};

/// Default minimum branch weight for the automatic separation-point search.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 0.05;

/// A two-branch decomposition of a normalised state; branches are unit norm
/// but not necessarily orthogonal (their overlap is `lambda`).
#[derive(Clone, Debug)]
pub struct Decomposition<T: Real> {
    pub a1: T,
    pub a2: T,
    pub psi1: State<T>,
    pub psi2: State<T>,
    /// ⟨ψ₂|ψ₁⟩.
    pub lambda: Cplx<T>,
}

impl<T: Real> Decomposition<T> {
    /// Build from amplitudes and unit branches, validating the norms.
    pub fn new(a1: T, a2: T, psi1: State<T>, psi2: State<T>) -> Result<Self> {
        if psi1.len() != psi2.len() {
            return Err(Error::DimensionMismatch { expected: psi1.len(), got: psi2.len() });
        }
        for (name, v) in [("psi1", &psi1), ("psi2", &psi2)] {
            let n = v.norm();
            if (n - T::one()).abs() > T::unit_norm_tol() {
                return Err(Error::Unnormalized {
                    norm: n.as_f64(),
                    tol: T::unit_norm_tol().as_f64(),
                });
            }
            let _ = name;
        }
        if a1 <= T::zero() || a2 <= T::zero() {
            return Err(Error::InvalidParameter(
                "branch amplitudes must be strictly positive".into(),
            ));
        }
        let lambda = psi2.dotc(&psi1);
        Ok(Decomposition { a1, a2, psi1, psi2, lambda })
    }

    /// a₁ψ₁ + a₂ψ₂.
    pub fn reconstruct(&self) -> State<T> {
        let mut out = self.psi1.clone() * Cplx::new(self.a1, T::zero());
        out.axpy(Cplx::new(self.a2, T::zero()), &self.psi2, Cplx::new(T::one(), T::zero()));
        out
    }
}

/// A state cut at a separation point of an observable's sector ladder,
/// together with the measurement statistics that justify the cut.
#[derive(Clone, Debug)]
pub struct GroundStateSplit<T: Real> {
    pub distribution: SectorDistribution<T>,
    pub separation_point: T,
    /// Index of the first sector in the upper branch.
    pub boundary_index: usize,
    pub a1: T,
    pub a2: T,
    pub psi1: State<T>,
    pub psi2: State<T>,
    /// ⟨ψ₂|ψ₁⟩ — identically zero for sector splits.
    pub lambda: Cplx<T>,
    /// Distance between the conditional means of the two branches.
    pub region_mean_distance: T,
    /// Distance between the most probable sectors of the two branches.
    pub region_peak_distance: T,
    /// Single-site eigenvalue spread δ_ς of the observable, carried along so
    /// window bounds know their width.
    pub site_span: T,
}

impl<T: Real> GroundStateSplit<T> {
    /// Weight within `half_width` of the separation point.
    pub fn separation_probability(&self, half_width: T) -> T {
        self.distribution.window_probability(self.separation_point, half_width)
    }

    /// View as a general decomposition (for the bounds that accept
    /// non-orthogonal branches).
    pub fn decomposition(&self) -> Decomposition<T> {
        Decomposition {
            a1: self.a1,
            a2: self.a2,
            psi1: self.psi1.clone(),
            psi2: self.psi2.clone(),
            lambda: self.lambda,
        }
    }
}

/// Split `state` at `separation_point` on the sector ladder.
///
/// Branch weights below the scalar's floor mean the state does not actually
/// straddle the point and the split is refused.
pub fn split_at<T: Real>(
    state: &State<T>,
    sectors: &SectorIndex<T>,
    separation_point: T,
) -> Result<GroundStateSplit<T>> {
    let distribution = SectorDistribution::from_state(state, sectors)?;
    let boundary_index = distribution.boundary_index(separation_point);
    let (w1, w2) = distribution.branch_weights(separation_point);
    let floor = T::split_floor();
    for w in [w1, w2] {
        if w < floor {
            return Err(Error::DegenerateSplit {
                separation_point: separation_point.as_f64(),
                weight: w.as_f64(),
                floor: floor.as_f64(),
            });
        }
    }
    let a1 = w1.sqrt();
    let a2 = w2.sqrt();
    let inv1 = Cplx::new(T::one() / a1, T::zero());
    let inv2 = Cplx::new(T::one() / a2, T::zero());
    let mut psi1 = State::zeros(state.len());
    let mut psi2 = State::zeros(state.len());
    sectors.for_each_basis_state(|index, sector| {
        if sector < boundary_index {
            psi1[index] = state[index] * inv1;
        } else {
            psi2[index] = state[index] * inv2;
        }
    });
    let region_mean_distance = distribution.branch_mean_distance(separation_point)?;
    let region_peak_distance = distribution.branch_peak_distance(separation_point)?;
    Ok(GroundStateSplit {
        distribution,
        separation_point,
        boundary_index,
        a1,
        a2,
        psi1,
        psi2,
        lambda: Cplx::new(T::zero(), T::zero()),
        region_mean_distance,
        region_peak_distance,
        site_span: sectors.site_span(),
    })
}

/// Choose the separation point automatically (lowest window weight, both
/// branches above `weight_floor`), then split there.
pub fn auto_split<T: Real>(
    state: &State<T>,
    sectors: &SectorIndex<T>,
    half_width: T,
    weight_floor: T,
) -> Result<GroundStateSplit<T>> {
    let distribution = SectorDistribution::from_state(state, sectors)?;
    let point = distribution.auto_separation_point(half_width, weight_floor)?;
    split_at(state, sectors, point)
}

/// Assert the split's structural guarantees against the state it came from:
/// exact branch orthogonality, amplitude normalisation, and reconstruction
/// to within the scalar's tolerance. Returns the reconstruction defect.
pub fn validate_split<T: Real>(split: &GroundStateSplit<T>, state: &State<T>) -> Result<T> {
    let overlap = split.psi2.dotc(&split.psi1);
    if overlap != Cplx::new(T::zero(), T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "sector branches must be exactly orthogonal, got ⟨ψ₂|ψ₁⟩ = {overlap:?}"
        )));
    }
    let weight_sum = split.a1 * split.a1 + split.a2 * split.a2;
    if (weight_sum - T::one()).abs() > T::unit_norm_tol() {
        return Err(Error::Unnormalized {
            norm: weight_sum.as_f64(),
            tol: T::unit_norm_tol().as_f64(),
        });
    }
    let defect = (split.decomposition().reconstruct() - state).norm();
    if defect > T::unit_norm_tol() {
        return Err(Error::InvalidParameter(format!(
            "branches do not reassemble the state: defect {:.3e}",
            defect.as_f64()
        )));
    }
    Ok(defect)
}

//! Upper bounds on the spectral gap of a local Hamiltonian whose ground
//! state splits into two branches, and the certificates that record them.
//!
//! Four bound families live here:
//!
//! * [`decomposition_bound`] — for any two-branch decomposition
//!   ψ = a₁ψ₁ + a₂ψ₂ (branches unit norm, overlap λ allowed):
//!   ΔE ≤ |⟨ψ₂|Ĥ|ψ₁⟩ − λE₀| / (a₁a₂(1 − |λ|²)).
//! * [`window_bound`] / [`window_bound_klocal`] — for sector splits of
//!   K-local Hamiltonians the matrix element is controlled by the weight the
//!   state leaves near the cut: ΔE ≤ |I|/(2a₁²a₂²)·max‖block‖·P_window.
//! * [`ghz_bound`] — for superpositions of product states with single-site
//!   overlap ω, the cross matrix element collapses to C(N,K)·ω^{N−K}·H₂₁^[K].
//! * [`distinguishability_bound`] — when the branches can be told apart by a
//!   binary measurement on each of Ñ disjoint groups with statistics q, the
//!   cross element obeys |I|·max‖block‖·q^{Ñ−K}.
//!
//! Every certificate records all the numbers entering its formula so a
//! sceptical reader can recompute the value from the JSON alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combin::LnFactorials;
use crate::error::Error;
use crate::hamiltonian::{LocalHamiltonian, NormReport};
use crate::scalar::Real;
use crate::split::{Decomposition, GroundStateSplit};
use crate::{Cplx, Result};

/// Absolute slack allowed when checking a bound against an exact gap:
/// `satisfied` means bound ≥ gap − `SOUNDNESS_SLACK`. Large enough to absorb
/// eigensolver residuals at desk scale, small enough that a genuinely broken
/// bound cannot hide behind it.
pub const SOUNDNESS_SLACK: f64 = 1e-8;

/// Which bound produced a certificate. Serialized names are part of the
/// output format and must not change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    /// General two-branch decomposition, overlap allowed.
    #[serde(rename = "lemma")]
    Decomposition,
    /// Sector-window bound specialised to 2-local interactions.
    #[serde(rename = "theorem2local")]
    Window2Local,
    /// Sector-window bound for general K-local interactions.
    #[serde(rename = "theoremKlocal")]
    WindowKLocal,
    /// Product-state superposition with per-site branch overlap ω.
    #[serde(rename = "ghz")]
    ProductSuperposition,
    /// Group-measurement distinguishability bound.
    #[serde(rename = "local_distinguishability")]
    LocalDistinguishability,
}

/// A gap bound together with every quantity that entered its formula and,
/// optionally, the exact gap it was checked against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapCertificate {
    pub kind: CertificateKind,
    pub bound_value: f64,
    pub inputs: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub satisfied: Option<bool>,
}

impl GapCertificate {
    pub fn new(kind: CertificateKind, bound_value: f64, inputs: BTreeMap<String, f64>) -> Self {
        GapCertificate { kind, bound_value, inputs, exact_gap: None, satisfied: None }
    }

    /// Attach the exact gap and mark whether the bound holds against it.
    pub fn with_exact_gap(mut self, gap: f64) -> Self {
        self.exact_gap = Some(gap);
        self.satisfied = Some(self.bound_value >= gap - SOUNDNESS_SLACK);
        self
    }
}

fn record(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Gap bound from an arbitrary two-branch decomposition of the ground state:
/// ΔE ≤ |⟨ψ₂|Ĥ|ψ₁⟩ − λE₀| / (a₁a₂(1 − |λ|²)), λ = ⟨ψ₂|ψ₁⟩.
///
/// `e0` is the actual ground energy; it is not assumed to be zero.
pub fn decomposition_bound<T: Real>(
    h: &LocalHamiltonian<T>,
    decomp: &Decomposition<T>,
    e0: T,
) -> Result<GapCertificate> {
    if decomp.a1 <= T::zero() || decomp.a2 <= T::zero() {
        return Err(Error::InvalidParameter(
            "branch amplitudes must be strictly positive".into(),
        ));
    }
    let lambda = decomp.lambda;
    let lambda_sq = lambda.norm_sqr();
    if lambda_sq.sqrt() >= T::one() - T::unit_norm_tol() {
        return Err(Error::OverlapTooLarge { overlap: lambda_sq.sqrt().as_f64() });
    }
    let h21 = h.matrix_element(&decomp.psi2, &decomp.psi1)?;
    let numerator = (h21 - lambda * Cplx::new(e0, T::zero())).norm_sqr().sqrt();
    let denominator = decomp.a1 * decomp.a2 * (T::one() - lambda_sq);
    let bound = numerator / denominator;
    let inputs = record(&[
        ("a1", decomp.a1.as_f64()),
        ("a2", decomp.a2.as_f64()),
        ("e0", e0.as_f64()),
        ("h21_re", h21.re.as_f64()),
        ("h21_im", h21.im.as_f64()),
        ("lambda_re", lambda.re.as_f64()),
        ("lambda_im", lambda.im.as_f64()),
    ]);
    Ok(GapCertificate::new(CertificateKind::Decomposition, bound.as_f64(), inputs))
}

fn window_certificate<T: Real>(
    kind: CertificateKind,
    h: &LocalHamiltonian<T>,
    split: &GroundStateSplit<T>,
    norms: &NormReport<T>,
    half_width: T,
) -> Result<GapCertificate> {
    if split.lambda != Cplx::new(T::zero(), T::zero()) {
        return Err(Error::InvalidParameter(
            "window bounds need a sector split with exactly orthogonal branches".into(),
        ));
    }
    if split.psi1.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: split.psi1.len() });
    }
    let count = h.interaction_set_size();
    let a1_sq = split.a1 * split.a1;
    let a2_sq = split.a2 * split.a2;
    let p_sep = split.separation_probability(half_width);
    let two = T::of(2.0);
    let bound = T::of_usize(count) / (two * a1_sq * a2_sq) * norms.max_norm * p_sep;
    let inputs = record(&[
        ("interaction_count", count as f64),
        ("order", h.order() as f64),
        ("max_norm", norms.max_norm.as_f64()),
        ("a1_sq", a1_sq.as_f64()),
        ("a2_sq", a2_sq.as_f64()),
        ("p_sep", p_sep.as_f64()),
        ("half_width", half_width.as_f64()),
        ("site_span", split.site_span.as_f64()),
        ("separation_point", split.separation_point.as_f64()),
    ]);
    Ok(GapCertificate::new(kind, bound.as_f64(), inputs))
}

/// Sector-window gap bound for 2-local Hamiltonians:
/// ΔE ≤ |I|/(2a₁²a₂²) · max‖block‖ · P(|s − s_m̄| ≤ 2δ_ς).
pub fn window_bound<T: Real>(
    h: &LocalHamiltonian<T>,
    split: &GroundStateSplit<T>,
    norms: &NormReport<T>,
) -> Result<GapCertificate> {
    if h.order() != 2 {
        return Err(Error::WrongOrder { needed: 2, got: h.order() });
    }
    let half_width = T::of(2.0) * split.site_span;
    window_certificate(CertificateKind::Window2Local, h, split, norms, half_width)
}

/// Sector-window gap bound for K-local Hamiltonians. A term touching K sites
/// moves the additive observable by at most K·δ_ς, so the window half-width
/// is K·δ_ς; at K = 2 this is exactly [`window_bound`].
pub fn window_bound_klocal<T: Real>(
    h: &LocalHamiltonian<T>,
    split: &GroundStateSplit<T>,
    norms: &NormReport<T>,
) -> Result<GapCertificate> {
    let half_width = T::of_usize(h.order()) * split.site_span;
    window_certificate(CertificateKind::WindowKLocal, h, split, norms, half_width)
}

/// Cross-matrix-element bound for an N-fold product superposition whose
/// branches overlap site-wise by ω: C(N,K) · ω^(N−K) · h21k, evaluated in
/// the log domain so N in the hundreds cannot overflow or underflow.
pub fn ghz_bound<T: Real>(n: usize, k: usize, omega: T, h21k: T) -> Result<T> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "interaction order must satisfy 1 ≤ K ≤ N, got K = {k}, N = {n}"
        )));
    }
    if omega < T::zero() || omega >= T::one() {
        return Err(Error::InvalidParameter(format!(
            "per-site branch overlap must lie in [0, 1), got {}",
            omega.as_f64()
        )));
    }
    if h21k < T::zero() {
        return Err(Error::InvalidParameter(
            "local cross norm must be non-negative".into(),
        ));
    }
    if h21k == T::zero() || (omega == T::zero() && n > k) {
        return Ok(T::zero());
    }
    let table = LnFactorials::<T>::up_to(n);
    let mut ln = table.ln_binomial(n, k) + h21k.ln();
    if n > k {
        ln += T::of_usize(n - k) * omega.ln();
    }
    Ok(ln.exp())
}

/// [`ghz_bound`] wrapped in a certificate.
pub fn ghz_certificate<T: Real>(n: usize, k: usize, omega: T, h21k: T) -> Result<GapCertificate> {
    let bound = ghz_bound(n, k, omega, h21k)?;
    let inputs = record(&[
        ("n", n as f64),
        ("k", k as f64),
        ("omega", omega.as_f64()),
        ("h21k", h21k.as_f64()),
    ]);
    Ok(GapCertificate::new(CertificateKind::ProductSuperposition, bound.as_f64(), inputs))
}

/// Per-group distinguishability of the two branches under a binary
/// measurement: q = √(p₁₊p₂₊) + √(p₁₋p₂₋) with p_{i,−} = 1 − p_{i,+}.
/// q = 1 exactly when the outcome statistics coincide.
pub fn distinguishability_q<T: Real>(p1_plus: T, p2_plus: T) -> Result<T> {
    for (name, p) in [("p1_plus", p1_plus), ("p2_plus", p2_plus)] {
        if !(T::zero()..=T::one()).contains(&p) {
            return Err(Error::InvalidProbability { name, value: p.as_f64() });
        }
    }
    let plus = (p1_plus * p2_plus).sqrt();
    let minus = ((T::one() - p1_plus) * (T::one() - p2_plus)).sqrt();
    Ok(plus + minus)
}

/// Cross-matrix-element bound when the branches are distinguishable on Ñ
/// disjoint site groups: count · max_norm · q^(Ñ−K), in the log domain.
pub fn distinguishability_bound<T: Real>(
    q: T,
    n_tilde: usize,
    k: usize,
    interaction_count: u64,
    max_norm: T,
) -> Result<T> {
    if !(T::zero()..=T::one()).contains(&q) {
        return Err(Error::InvalidProbability { name: "q", value: q.as_f64() });
    }
    if n_tilde <= k {
        return Err(Error::InvalidParameter(format!(
            "need more groups than the interaction order, got Ñ = {n_tilde}, K = {k}"
        )));
    }
    if max_norm < T::zero() {
        return Err(Error::InvalidParameter(
            "interaction norm must be non-negative".into(),
        ));
    }
    if q == T::zero() || interaction_count == 0 || max_norm == T::zero() {
        return Ok(T::zero());
    }
    let ln = T::of(interaction_count as f64).ln()
        + max_norm.ln()
        + T::of_usize(n_tilde - k) * q.ln();
    Ok(ln.exp())
}

/// [`distinguishability_bound`] wrapped in a certificate.
pub fn distinguishability_certificate<T: Real>(
    q: T,
    n_tilde: usize,
    k: usize,
    interaction_count: u64,
    max_norm: T,
) -> Result<GapCertificate> {
    let bound = distinguishability_bound(q, n_tilde, k, interaction_count, max_norm)?;
    let inputs = record(&[
        ("q", q.as_f64()),
        ("n_tilde", n_tilde as f64),
        ("k", k as f64),
        ("interaction_count", interaction_count as f64),
        ("max_norm", max_norm.as_f64()),
    ]);
    Ok(GapCertificate::new(
        CertificateKind::LocalDistinguishability,
        bound.as_f64(),
        inputs,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_sectors, AdditiveObservable, ManyBodySpace};
    use crate::combin::binomial_exact;
    use crate::eigen::{lowest_two, SolveOptions};
    use crate::hamiltonian::{assemble, spin, tfim_chain, InteractionTerm};
    use crate::random::random_klocal;
    use crate::split::{auto_split, split_at, DEFAULT_WEIGHT_FLOOR};
    use crate::State;
    use nalgebra::{dmatrix, DMatrix};
    use proptest::prelude::*;

    fn basis_state(dim: usize, index: usize) -> State<f64> {
        let mut s = State::zeros(dim);
        s[index] = Cplx::new(1.0, 0.0);
        s
    }

    #[test]
    fn two_level_decomposition_bound_is_exactly_the_gap() {
        // H = [[1,-1],[-1,1]] has spectrum {0, 2}; splitting its ground state
        // (|0⟩+|1⟩)/√2 into the two basis states must reproduce gap 2.
        let space = ManyBodySpace::qubits(1).unwrap();
        let block = dmatrix![1.0, -1.0; -1.0, 1.0];
        let h = assemble(space, vec![InteractionTerm::new_real(vec![0], block).unwrap()])
            .unwrap();
        let decomp = Decomposition::new(
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
            basis_state(2, 0),
            basis_state(2, 1),
        )
        .unwrap();
        let cert = decomposition_bound(&h, &decomp, 0.0).unwrap();
        assert!(
            (cert.bound_value - 2.0).abs() < 1e-12,
            "two-level bound should be tight, got {}",
            cert.bound_value
        );
        let cert = cert.with_exact_gap(2.0);
        assert_eq!(cert.satisfied, Some(true));
        assert_eq!(cert.inputs["h21_re"], -1.0);
    }

    #[test]
    fn vanishing_cross_element_certifies_degeneracy() {
        // Ferromagnetic two-site Ising: |00⟩ and |11⟩ are degenerate grounds;
        // the cross element between them vanishes, so the bound is zero even
        // though E₀ = −1 is nonzero.
        let space = ManyBodySpace::qubits(2).unwrap();
        let zz = spin::pauli_z::<f64>().kronecker(&spin::pauli_z::<f64>());
        let h = assemble(space, vec![InteractionTerm::new(vec![0, 1], -zz).unwrap()]).unwrap();
        let decomp = Decomposition::new(
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
            basis_state(4, 0),
            basis_state(4, 3),
        )
        .unwrap();
        let cert = decomposition_bound(&h, &decomp, -1.0).unwrap();
        assert_eq!(cert.bound_value, 0.0);
        assert_eq!(cert.with_exact_gap(0.0).satisfied, Some(true));
    }

    #[test]
    fn overlapping_branches_are_rejected() {
        let space = ManyBodySpace::qubits(1).unwrap();
        let h = assemble(
            space,
            vec![InteractionTerm::new(vec![0], spin::pauli_x::<f64>()).unwrap()],
        )
        .unwrap();
        let psi = basis_state(2, 0);
        let mut decomp = Decomposition::new(0.5, 0.5, psi.clone(), psi.clone()).unwrap();
        assert_eq!(decomp.lambda.re, 1.0);
        decomp.lambda = Cplx::new(1.0 - 1e-13, 0.0);
        assert!(matches!(
            decomposition_bound(&h, &decomp, 0.0),
            Err(Error::OverlapTooLarge { .. })
        ));
    }

    #[test]
    fn single_bond_window_bound_matches_hand_arithmetic() {
        // One bond, balanced split: prefactor |I|/(2a₁²a₂²) = 2.
        let h = tfim_chain(2, 1.0, 0.4, false).unwrap();
        assert_eq!(h.interaction_set_size(), 1);
        let norms = h.term_norms();
        let sectors = enumerate_sectors(h.space(), &AdditiveObservable::spin_z()).unwrap();
        let pair = lowest_two(&h, &SolveOptions::default()).unwrap();
        let split = split_at(&pair.ground, &sectors, 0.0).unwrap();
        let cert = window_bound(&h, &split, &norms).unwrap();
        let by_hand = 1.0 / (2.0 * cert.inputs["a1_sq"] * cert.inputs["a2_sq"])
            * norms.max_norm
            * split.separation_probability(2.0);
        assert!(
            (cert.bound_value - by_hand).abs() <= 1e-15 * by_hand,
            "certificate {} vs hand arithmetic {by_hand}",
            cert.bound_value
        );
        assert!(cert.clone().with_exact_gap(pair.gap).satisfied.unwrap());
        // Both qubit sectors lie within the window, so P_sep = 1 here (up to
        // the rounding of a two-term probability sum).
        assert!((cert.inputs["p_sep"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn klocal_window_reduces_to_the_two_local_formula() {
        let h = tfim_chain(5, 1.0, 0.7, false).unwrap();
        let norms = h.term_norms();
        let sectors = enumerate_sectors(h.space(), &AdditiveObservable::spin_z()).unwrap();
        let pair = lowest_two(&h, &SolveOptions::default()).unwrap();
        let split = auto_split(&pair.ground, &sectors, 2.0, DEFAULT_WEIGHT_FLOOR).unwrap();
        let two = window_bound(&h, &split, &norms).unwrap();
        let general = window_bound_klocal(&h, &split, &norms).unwrap();
        assert_eq!(two.bound_value, general.bound_value);
        assert_eq!(two.inputs["half_width"], general.inputs["half_width"]);
        assert_eq!(general.kind, CertificateKind::WindowKLocal);
    }

    #[test]
    fn window_bound_requires_two_local_interactions() {
        // Ferromagnetic bonds plus one 3-site flip term: order 3 with a
        // unique corner-superposition ground state, so the 2-local formula
        // must refuse and the K-local variant applies.
        let space = ManyBodySpace::qubits(3).unwrap();
        let z = spin::pauli_z::<f64>();
        let zz = z.kronecker(&z) * Cplx::new(-1.0, 0.0);
        let xxx = spin::pauli_x::<f64>()
            .kronecker(&spin::pauli_x::<f64>())
            .kronecker(&spin::pauli_x::<f64>())
            * Cplx::new(-0.8, 0.0);
        let h = assemble(
            space,
            vec![
                InteractionTerm::new(vec![0, 1], zz.clone()).unwrap(),
                InteractionTerm::new(vec![1, 2], zz).unwrap(),
                InteractionTerm::new(vec![0, 1, 2], xxx).unwrap(),
            ],
        )
        .unwrap();
        let sectors = enumerate_sectors(h.space(), &AdditiveObservable::spin_z()).unwrap();
        let pair = lowest_two(&h, &SolveOptions::default()).unwrap();
        // The triple flip pairs each basis state with its global reversal in
        // a 2×2 block [[E_z, -0.8], [-0.8, E_z]]; the corner pair at E_z = -2
        // gives E₀ = -2.8 and its antisymmetric partner E₁ = -1.2.
        assert!((pair.gap - 1.6).abs() < 1e-10, "gap {}", pair.gap);
        let split = split_at(&pair.ground, &sectors, 0.0).unwrap();
        let norms = h.term_norms();
        assert!(matches!(
            window_bound(&h, &split, &norms),
            Err(Error::WrongOrder { needed: 2, got: 3 })
        ));
        // The K-local window spans all sectors of a 3-qubit system, so the
        // separation probability saturates.
        let cert = window_bound_klocal(&h, &split, &norms).unwrap();
        assert!((cert.inputs["p_sep"] - 1.0).abs() < 1e-12);
        assert!(cert.with_exact_gap(pair.gap).satisfied.unwrap());
    }

    #[test]
    fn random_two_local_instances_stay_sound() {
        let opts = SolveOptions::default();
        for seed in 0..6u64 {
            let h = random_klocal::<f64>(5, 2, 2, 7, seed).unwrap();
            let norms = h.term_norms();
            let sectors = enumerate_sectors(h.space(), &AdditiveObservable::spin_z()).unwrap();
            let pair = lowest_two(&h, &opts).unwrap();
            if pair.degenerate {
                continue;
            }
            let split = match auto_split(&pair.ground, &sectors, 2.0, DEFAULT_WEIGHT_FLOOR) {
                Ok(s) => s,
                // A concentrated ground state admits no separation point;
                // that is a legitimate outcome, not a soundness failure.
                Err(Error::NoSeparationPoint { .. }) => continue,
                Err(e) => panic!("unexpected split failure for seed {seed}: {e}"),
            };
            let window = window_bound(&h, &split, &norms).unwrap().with_exact_gap(pair.gap);
            assert_eq!(window.satisfied, Some(true), "window bound unsound for seed {seed}");
            let general = decomposition_bound(&h, &split.decomposition(), pair.e0)
                .unwrap()
                .with_exact_gap(pair.gap);
            assert_eq!(general.satisfied, Some(true), "general bound unsound for seed {seed}");
        }
    }

    #[test]
    fn product_superposition_bound_arithmetic() {
        let b = ghz_bound(4, 2, std::f64::consts::FRAC_1_SQRT_2, 1.0).unwrap();
        assert!((b - 3.0).abs() < 1e-12 * 3.0, "C(4,2)·(1/√2)² = 3, got {b}");
        assert_eq!(ghz_bound(10, 3, 0.0, 5.0).unwrap(), 0.0);
        assert_eq!(ghz_bound(4, 4, 0.0, 2.5).unwrap(), 2.5, "K = N leaves no ω factor");
        assert!(ghz_bound(4, 2, 1.0, 1.0).is_err());
        assert!(ghz_bound(4, 5, 0.5, 1.0).is_err());
        assert!(ghz_bound(4, 2, 0.5, -1.0).is_err());
    }

    #[test]
    fn product_superposition_rate_is_exactly_ln_omega() {
        // After dividing out the pair count the decay is a pure exponential,
        // so any two points give the rate to machine precision.
        let omega: f64 = 0.9;
        let r20 = ghz_bound(20, 2, omega, 1.0).unwrap() / binomial_exact(20, 2) as f64;
        let r40 = ghz_bound(40, 2, omega, 1.0).unwrap() / binomial_exact(40, 2) as f64;
        let slope = (r40.ln() - r20.ln()) / 20.0;
        assert!(
            (slope - omega.ln()).abs() < 1e-9,
            "slope {slope} should equal ln ω = {}",
            omega.ln()
        );
    }

    #[test]
    fn distinguishability_examples() {
        assert!((distinguishability_q::<f64>(0.5, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((distinguishability_q::<f64>(0.9, 0.1).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(distinguishability_q(1.0, 0.0).unwrap(), 0.0);
        assert!(matches!(
            distinguishability_q(1.2, 0.5),
            Err(Error::InvalidProbability { name: "p1_plus", .. })
        ));

        assert_eq!(distinguishability_bound(0.0, 10, 2, 45, 1.0).unwrap(), 0.0);
        assert_eq!(distinguishability_bound(1.0, 10, 2, 45, 2.0).unwrap(), 90.0);
        let b = distinguishability_bound(0.6, 50, 2, 100, 1.0).unwrap();
        let direct = 100.0 * 0.6f64.powi(48);
        assert!((b - direct).abs() < 1e-12 * direct, "{b} vs {direct}");
        assert!(matches!(
            distinguishability_bound(0.5, 2, 2, 10, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn certificates_serialize_with_pinned_kind_names() {
        let pairs = [
            (CertificateKind::Decomposition, "lemma"),
            (CertificateKind::Window2Local, "theorem2local"),
            (CertificateKind::WindowKLocal, "theoremKlocal"),
            (CertificateKind::ProductSuperposition, "ghz"),
            (CertificateKind::LocalDistinguishability, "local_distinguishability"),
        ];
        for (kind, name) in pairs {
            let cert = GapCertificate::new(kind, 1.0, record(&[("x", 2.0)])).with_exact_gap(0.5);
            let json = serde_json::to_value(&cert).unwrap();
            assert_eq!(json["kind"], *name);
            assert_eq!(json["satisfied"], true);
            let back: GapCertificate = serde_json::from_value(json).unwrap();
            assert_eq!(back, cert);
        }
        // Without an exact gap the optional fields stay off the wire.
        let bare = GapCertificate::new(CertificateKind::Decomposition, 1.0, BTreeMap::new());
        let json = serde_json::to_string(&bare).unwrap();
        assert!(!json.contains("exact_gap"), "unset fields must not serialize: {json}");
    }

    // Keep a dense-oracle cross-check in the unit tests so a regression in
    // the streamed matrix element cannot hide behind the solver.
    #[test]
    fn decomposition_bound_matches_dense_matrix_element() {
        let h = random_klocal::<f64>(4, 2, 2, 5, 0xB0B).unwrap();
        let sectors = enumerate_sectors(h.space(), &AdditiveObservable::spin_z()).unwrap();
        let pair = lowest_two(&h, &SolveOptions::default()).unwrap();
        let split = split_at(&pair.ground, &sectors, 0.0).unwrap();
        let cert = decomposition_bound(&h, &split.decomposition(), pair.e0).unwrap();
        let dense: DMatrix<Cplx<f64>> = h.to_dense();
        let h21 = split.psi2.dotc(&(&dense * &split.psi1));
        let by_hand = h21.norm_sqr().sqrt() / (split.a1 * split.a2);
        assert!(
            (cert.bound_value - by_hand).abs() <= 1e-10 * by_hand.max(1.0),
            "streamed {} vs dense {by_hand}",
            cert.bound_value
        );
    }

    proptest! {
        #[test]
        fn distinguishability_bound_decays_with_group_count(
            q in 0.05f64..0.95,
            n_tilde in 3usize..40,
            count in 1u64..200,
        ) {
            let a = distinguishability_bound(q, n_tilde, 2, count, 1.5).unwrap();
            let b = distinguishability_bound(q, n_tilde + 1, 2, count, 1.5).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-12), "q^(Ñ−K) must shrink as Ñ grows");
        }

        #[test]
        fn product_bound_decays_once_past_the_polynomial_shoulder(
            omega in 0.05f64..0.9,
            k in 1usize..4,
            n in 2usize..60,
        ) {
            // C(N,K)·ω^(N−K) rises while the binomial still wins; past
            // N + 1 > K/(1−ω) the exponential takes over for good.
            prop_assume!(n >= k);
            prop_assume!((n + 1) as f64 > k as f64 / (1.0 - omega));
            let a = ghz_bound(n, k, omega, 2.0).unwrap();
            let b = ghz_bound(n + 1, k, omega, 2.0).unwrap();
            prop_assert!(b <= a * (1.0 + 1e-12));
        }

        #[test]
        fn q_is_a_fidelity(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0) {
            let q = distinguishability_q(p1, p2).unwrap();
            prop_assert!((0.0..=1.0 + 1e-15).contains(&q));
            // Equal statistics are indistinguishable; unequal ones are not.
            if (p1 - p2).abs() > 1e-9 {
                prop_assert!(q < 1.0);
            }
        }
    }
}

//! Many-body bookkeeping: site spaces, additive single-site observables and
//! the eigenvalue sectors they cut the product basis into.
//!
//! Basis convention used everywhere in the crate: a product basis state is a
//! little-endian integer in base d, so site `i` owns the digit at stride
//! `d^i`, and digit `b` at a site means the site sits in the `b`-th
//! eigenstate of the observable's single-site matrix (levels listed in
//! ascending order, each repeated by its degeneracy).
//!
//! Sector data is kept exact wherever possible: when level eigenvalues are
//! supplied as rationals, sector keys are rationals and two sectors are never
//! merged or separated by floating-point luck. Float-valued levels fall back
//! to a tolerance-based merge.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{compensated_sum, Real};
use crate::{Result, State};

/// Largest basis size the crate will enumerate: 2^22 ≈ 4.2 million states.
/// Above this, dense state vectors stop fitting comfortably in memory.
pub const MAX_DIM_LOG2: u32 = 22;

// ---------------------------------------------------------------------------
// Site and product spaces
// ---------------------------------------------------------------------------

/// A single site with local dimension `d ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteSpace {
    d: usize,
}

impl SiteSpace {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadSiteDimension(d));
        }
        Ok(SiteSpace { d })
    }

    pub fn qubit() -> Self {
        SiteSpace { d: 2 }
    }

    pub fn d(self) -> usize {
        self.d
    }
}

/// N identical sites; total dimension d^N, capped at [`MAX_DIM_LOG2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ManyBodySpace {
    n_sites: usize,
    d: usize,
    dim: usize,
}

impl ManyBodySpace {
    pub fn new(n_sites: usize, site: SiteSpace) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        let max = 1usize << MAX_DIM_LOG2;
        let mut dim = 1usize;
        for _ in 0..n_sites {
            dim = dim.checked_mul(site.d).filter(|&v| v <= max).ok_or(Error::SpaceTooLarge {
                d: site.d,
                n: n_sites,
                max_log2: MAX_DIM_LOG2,
            })?;
        }
        Ok(ManyBodySpace { n_sites, d: site.d, dim })
    }

    pub fn qubits(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, SiteSpace::qubit())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stride of `site` in the little-endian basis index: d^site.
    pub fn stride(&self, site: usize) -> usize {
        self.d.pow(site as u32)
    }

    /// The digit (local basis state) of `site` inside `index`.
    pub fn digit(&self, index: usize, site: usize) -> usize {
        index / self.stride(site) % self.d
    }
}

// ---------------------------------------------------------------------------
// Additive observables
// ---------------------------------------------------------------------------

/// One eigenvalue of the single-site matrix, with its degeneracy. The exact
/// rational form is carried along when the caller supplied one.
#[derive(Clone, Debug)]
pub struct Level<T> {
    pub value: T,
    pub exact: Option<Ratio<i64>>,
    pub degeneracy: usize,
}

/// An observable of the form S = Σᵢ Sᵢ with every Sᵢ the same diagonal d×d
/// matrix, described by its distinct eigenvalues ς₁ < ς₂ < … < ς_ℓ and their
/// degeneracies μ₁ + … + μ_ℓ = d.
#[derive(Clone, Debug)]
pub struct AdditiveObservable<T> {
    levels: Vec<Level<T>>,
    d: usize,
}

fn ratio_to<T: Real>(r: Ratio<i64>) -> T {
    T::of_i64(*r.numer()) / T::of_i64(*r.denom())
}

impl<T: Real> AdditiveObservable<T> {
    /// Build from `(eigenvalue, degeneracy)` pairs listed in the basis order
    /// of the site. Values must be non-decreasing; equal adjacent values
    /// (within the scalar's merge tolerance) are coalesced into one level.
    pub fn from_pairs(pairs: &[(T, usize)]) -> Result<Self> {
        let exact: Vec<Option<Ratio<i64>>> = pairs.iter().map(|_| None).collect();
        Self::build(pairs, &exact)
    }

    /// Exact-rational variant of [`Self::from_pairs`]; sector arithmetic
    /// downstream stays in integer arithmetic.
    pub fn from_rational_pairs(pairs: &[(Ratio<i64>, usize)]) -> Result<Self> {
        let float: Vec<(T, usize)> =
            pairs.iter().map(|&(r, mu)| (ratio_to::<T>(r), mu)).collect();
        let exact: Vec<Option<Ratio<i64>>> = pairs.iter().map(|&(r, _)| Some(r)).collect();
        Self::build(&float, &exact)
    }

    /// The z-component of a spin-1/2: eigenvalues ∓1/2 on a qubit, exact.
    pub fn spin_z() -> Self {
        Self::from_rational_pairs(&[(Ratio::new(-1, 2), 1), (Ratio::new(1, 2), 1)])
            .expect("static spin-z table is valid")
    }

    fn build(pairs: &[(T, usize)], exact: &[Option<Ratio<i64>>]) -> Result<Self> {
        let mut levels: Vec<Level<T>> = Vec::new();
        let mut d = 0usize;
        for (k, &(value, degeneracy)) in pairs.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidObservable("eigenvalue is not finite".into()));
            }
            if degeneracy == 0 {
                return Err(Error::InvalidObservable(format!(
                    "level {k} has degeneracy 0"
                )));
            }
            d += degeneracy;
            if let Some(last) = levels.last_mut() {
                let same = match (last.exact, exact[k]) {
                    (Some(a), Some(b)) => a == b,
                    _ => {
                        let scale = T::one().max(value.abs()).max(last.value.abs());
                        (value - last.value).abs() <= T::merge_tol() * scale
                    }
                };
                if same {
                    last.degeneracy += degeneracy;
                    continue;
                }
                if value < last.value {
                    return Err(Error::InvalidObservable(format!(
                        "eigenvalues must be listed in ascending order; level {k} decreases"
                    )));
                }
            }
            levels.push(Level { value, exact: exact[k], degeneracy });
        }
        if levels.len() < 2 {
            return Err(Error::InvalidObservable(
                "need at least two distinct eigenvalues".into(),
            ));
        }
        Ok(AdditiveObservable { levels, d })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Level<T>] {
        &self.levels
    }

    /// Spread between the largest and smallest single-site eigenvalue.
    /// Strictly positive by construction.
    pub fn site_span(&self) -> T {
        self.levels[self.levels.len() - 1].value - self.levels[0].value
    }

    /// True if every level carries an exact rational eigenvalue.
    pub fn is_exact(&self) -> bool {
        self.levels.iter().all(|l| l.exact.is_some())
    }

    /// Which level a single-site basis state belongs to.
    pub fn level_of_basis(&self) -> Vec<usize> {
        let mut table = Vec::with_capacity(self.d);
        for (l, level) in self.levels.iter().enumerate() {
            table.extend(std::iter::repeat_n(l, level.degeneracy));
        }
        table
    }

    /// The single-site matrix as a dense diagonal.
    pub fn site_matrix(&self) -> DMatrix<T> {
        let diag: Vec<T> = self
            .levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value, l.degeneracy))
            .collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
    }
}

// ---------------------------------------------------------------------------
// Observable JSON schema
// ---------------------------------------------------------------------------

/// Serialisable form of an observable: eigenvalues either as numbers or as
/// exact `"p/q"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservableConfig {
    pub levels: Vec<LevelEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelEntry {
    pub eigenvalue: LevelValue,
    pub degeneracy: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelValue {
    Rational(String),
    Number(f64),
}

fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    let bad = || Error::BadConfig(format!("cannot parse {s:?} as p or p/q"));
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad())?;
        let d: i64 = den.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        Ok(Ratio::new(n, d))
    } else {
        let n: i64 = s.parse().map_err(|_| bad())?;
        Ok(Ratio::from_integer(n))
    }
}

impl<T: Real> AdditiveObservable<T> {
    pub fn from_config(cfg: &ObservableConfig) -> Result<Self> {
        let all_rational = cfg.levels.iter().all(|e| matches!(e.eigenvalue, LevelValue::Rational(_)));
        if all_rational {
            let pairs: Result<Vec<(Ratio<i64>, usize)>> = cfg
                .levels
                .iter()
                .map(|e| match &e.eigenvalue {
                    LevelValue::Rational(s) => Ok((parse_ratio(s)?, e.degeneracy)),
                    LevelValue::Number(_) => unreachable!(),
                })
                .collect();
            Self::from_rational_pairs(&pairs?)
        } else {
            let pairs: Result<Vec<(T, usize)>> = cfg
                .levels
                .iter()
                .map(|e| {
                    let v = match &e.eigenvalue {
                        LevelValue::Number(x) => T::of(*x),
                        LevelValue::Rational(s) => ratio_to::<T>(parse_ratio(s)?),
                    };
                    Ok((v, e.degeneracy))
                })
                .collect();
            Self::from_pairs(&pairs?)
        }
    }

    pub fn to_config(&self) -> ObservableConfig {
        let levels = self
            .levels
            .iter()
            .map(|l| LevelEntry {
                eigenvalue: match l.exact {
                    Some(r) => LevelValue::Rational(format!("{}/{}", r.numer(), r.denom())),
                    None => LevelValue::Number(l.value.as_f64()),
                },
                degeneracy: l.degeneracy,
            })
            .collect();
        ObservableConfig { levels }
    }
}

// ---------------------------------------------------------------------------
// Sectors
// ---------------------------------------------------------------------------

/// The decomposition of the product space into eigenspaces of S = Σᵢ Sᵢ.
///
/// A sector is labelled by its eigenvalue s = Σ_l n_l ς_l and collects every
/// occupation vector (n₁, …, n_ℓ) that lands on that value; its dimension is
/// Σ over those vectors of (N choose n₁, …, n_ℓ) · Π_l μ_l^{n_l}.
#[derive(Clone, Debug)]
pub struct SectorIndex<T> {
    n_sites: usize,
    d: usize,
    dim: usize,
    /// Sector eigenvalues, strictly ascending.
    values: Vec<T>,
    /// Exact eigenvalues when the observable was exact.
    exact_values: Option<Vec<Ratio<i64>>>,
    /// Sector dimensions; they sum to d^N.
    dims: Vec<u64>,
    /// Occupation vectors per sector, each of length `n_levels`.
    occupations: Vec<Vec<Vec<usize>>>,
    /// Level index of each single-site basis state.
    site_level: Vec<usize>,
    /// Occupation vector (as u16 counts) → sector id.
    by_occupation: HashMap<Vec<u16>, u32>,
    n_levels: usize,
    site_span: T,
}

/// Enumerate the sectors of `obs` on `space`.
///
/// With exact rational levels, occupation vectors are grouped by exact
/// eigenvalue; otherwise two candidate sectors closer than the scalar's merge
/// tolerance (relative to their magnitude) are treated as one.
pub fn enumerate_sectors<T: Real>(
    space: &ManyBodySpace,
    obs: &AdditiveObservable<T>,
) -> Result<SectorIndex<T>> {
    if obs.d() != space.d() {
        return Err(Error::ObservableMismatch { observable_d: obs.d(), space_d: space.d() });
    }
    let n = space.n_sites();
    let n_levels = obs.num_levels();
    let comps = crate::combin::compositions(n, n_levels);

    // Eigenvalue of each occupation vector, exact and floating.
    let float_value = |comp: &[usize]| -> T {
        compensated_sum(
            comp.iter()
                .zip(obs.levels())
                .map(|(&c, l)| T::of_usize(c) * l.value),
        )
    };
    let exact_value = |comp: &[usize]| -> Option<Ratio<i64>> {
        let mut acc = Ratio::from_integer(0i64);
        for (&c, l) in comp.iter().zip(obs.levels()) {
            acc += Ratio::from_integer(c as i64) * l.exact?;
        }
        Some(acc)
    };

    // Group compositions into sectors.
    let mut order: Vec<usize> = (0..comps.len()).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut exact_values: Option<Vec<Ratio<i64>>> = None;
    if obs.is_exact() {
        let keys: Vec<Ratio<i64>> =
            comps.iter().map(|c| exact_value(c).expect("observable is exact")).collect();
        order.sort_by_key(|&i| keys[i]);
        let mut values = Vec::new();
        for &i in &order {
            if values.last() == Some(&keys[i]) {
                groups.last_mut().expect("group exists for repeated key").push(i);
            } else {
                values.push(keys[i]);
                groups.push(vec![i]);
            }
        }
        exact_values = Some(values);
    } else {
        let keys: Vec<T> = comps.iter().map(|c| float_value(c)).collect();
        order.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).expect("finite keys"));
        let mut last_key = None;
        for &i in &order {
            let merge = last_key.is_some_and(|prev: T| {
                let scale = T::one().max(prev.abs()).max(keys[i].abs());
                keys[i] - prev <= T::merge_tol() * scale
            });
            if merge {
                groups.last_mut().expect("group exists when merging").push(i);
            } else {
                groups.push(vec![i]);
            }
            last_key = Some(keys[i]);
        }
    }

    // Values, dimensions and the occupation→sector map.
    let mut values = Vec::with_capacity(groups.len());
    let mut dims = Vec::with_capacity(groups.len());
    let mut occupations = Vec::with_capacity(groups.len());
    let mut by_occupation = HashMap::new();
    for (sector, group) in groups.iter().enumerate() {
        let rep = &comps[group[0]];
        values.push(match &exact_values {
            Some(ev) => ratio_to::<T>(ev[sector]),
            None => float_value(rep),
        });
        let mut dim_sum: u128 = 0;
        let mut occ = Vec::with_capacity(group.len());
        for &ci in group {
            let comp = &comps[ci];
            let mut states: u128 = crate::combin::multinomial_exact(comp);
            for (l, &c) in comp.iter().enumerate() {
                states *= (obs.levels()[l].degeneracy as u128).pow(c as u32);
            }
            dim_sum += states;
            by_occupation.insert(
                comp.iter().map(|&c| c as u16).collect::<Vec<u16>>(),
                sector as u32,
            );
            occ.push(comp.clone());
        }
        dims.push(dim_sum as u64);
        occupations.push(occ);
    }

    let total: u128 = dims.iter().map(|&d| d as u128).sum();
    debug_assert_eq!(total, space.dim() as u128, "sector dimensions must tile the space");
    if total != space.dim() as u128 {
        return Err(Error::InvalidObservable(
            "internal sector enumeration lost basis states".into(),
        ));
    }

    Ok(SectorIndex {
        n_sites: n,
        d: space.d(),
        dim: space.dim(),
        values,
        exact_values,
        dims,
        occupations,
        site_level: obs.level_of_basis(),
        by_occupation,
        n_levels,
        site_span: obs.site_span(),
    })
}

impl<T: Real> SectorIndex<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sector eigenvalues s₁ < s₂ < … < s_M.
    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, sector: usize) -> T {
        self.values[sector]
    }

    pub fn exact_eigenvalues(&self) -> Option<&[Ratio<i64>]> {
        self.exact_values.as_deref()
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    /// Occupation vectors (n₁, …, n_ℓ) belonging to a sector.
    pub fn occupations(&self, sector: usize) -> &[Vec<usize>] {
        &self.occupations[sector]
    }

    /// Single-site eigenvalue spread δ_ς of the underlying observable.
    pub fn site_span(&self) -> T {
        self.site_span
    }

    /// Which sector a product basis state belongs to.
    pub fn membership(&self, index: usize) -> usize {
        let mut counts = vec![0u16; self.n_levels];
        let mut rest = index;
        for _ in 0..self.n_sites {
            counts[self.site_level[rest % self.d]] += 1;
            rest /= self.d;
        }
        self.by_occupation[&counts[..]] as usize
    }

    /// Visit every basis index with its sector id, in index order.
    ///
    /// Digits are advanced odometer-style so the cost per state is O(1)
    /// amortised plus one hash lookup, not O(N).
    pub fn for_each_basis_state(&self, mut f: impl FnMut(usize, usize)) {
        let mut digits = vec![0usize; self.n_sites];
        let mut counts = vec![0u16; self.n_levels];
        counts[self.site_level[0]] = self.n_sites as u16;
        let mut sector = self.by_occupation[&counts[..]] as usize;
        for index in 0..self.dim {
            if index > 0 {
                let mut site = 0;
                loop {
                    let old = digits[site];
                    let new = if old + 1 == self.d { 0 } else { old + 1 };
                    digits[site] = new;
                    counts[self.site_level[old]] -= 1;
                    counts[self.site_level[new]] += 1;
                    if new != 0 {
                        break;
                    }
                    site += 1;
                }
                sector = self.by_occupation[&counts[..]] as usize;
            }
            f(index, sector);
        }
    }

    /// Project a state onto one sector (other components zeroed). The result
    /// is not renormalised.
    pub fn project(&self, state: &State<T>, sector: usize) -> Result<State<T>> {
        self.check_dim(state)?;
        let mut out = State::zeros(self.dim);
        self.for_each_basis_state(|index, s| {
            if s == sector {
                out[index] = state[index];
            }
        });
        Ok(out)
    }

    fn check_dim(&self, state: &State<T>) -> Result<()> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: state.len() });
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Distributions over sectors
// ---------------------------------------------------------------------------

/// Probability weights of a normalised state over the sectors of an
/// observable, or any closed-form outcome distribution over ascending values.
#[derive(Clone, Debug)]
pub struct SectorDistribution<T> {
    values: Vec<T>,
    probs: Vec<T>,
}

impl<T: Real> SectorDistribution<T> {
    /// Measure `state` in the sector decomposition.
    pub fn from_state(state: &State<T>, sectors: &SectorIndex<T>) -> Result<Self> {
        sectors.check_dim(state)?;
        let norm_sq = compensated_sum((0..state.len()).map(|i| state[i].norm_sqr()));
        let tol = T::unit_norm_tol();
        if (norm_sq - T::one()).abs() > tol {
            return Err(Error::Unnormalized {
                norm: norm_sq.sqrt().as_f64(),
                tol: tol.as_f64(),
            });
        }
        let mut probs = vec![T::zero(); sectors.len()];
        sectors.for_each_basis_state(|index, sector| {
            probs[sector] += state[index].norm_sqr();
        });
        Ok(SectorDistribution { values: sectors.eigenvalues().to_vec(), probs })
    }

    /// Wrap a closed-form distribution. Values must be strictly ascending,
    /// weights non-negative and summing to 1 within the scalar's tolerance.
    pub fn from_parts(values: Vec<T>, probs: Vec<T>) -> Result<Self> {
        if values.len() != probs.len() || values.is_empty() {
            return Err(Error::InvalidParameter(
                "distribution needs matching, non-empty values and weights".into(),
            ));
        }
        for w in values.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::UnorderedSizes { prev: w[0].as_f64(), next: w[1].as_f64() });
            }
        }
        if let Some(&p) = probs.iter().find(|&&p| p < T::zero() || !p.is_finite()) {
            return Err(Error::InvalidProbability { name: "sector weight", value: p.as_f64() });
        }
        let total = compensated_sum(probs.iter().copied());
        if (total - T::one()).abs() > T::unit_norm_tol() {
            return Err(Error::Unnormalized { norm: total.as_f64(), tol: T::unit_norm_tol().as_f64() });
        }
        Ok(SectorDistribution { values, probs })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn total(&self) -> T {
        compensated_sum(self.probs.iter().copied())
    }

    pub fn mean(&self) -> T {
        compensated_sum(self.values.iter().zip(&self.probs).map(|(&v, &p)| v * p))
    }

    pub fn variance(&self) -> T {
        let mu = self.mean();
        compensated_sum(
            self.values
                .iter()
                .zip(&self.probs)
                .map(|(&v, &p)| (v - mu) * (v - mu) * p),
        )
    }

    /// Total weight within `half_width` of `center`, boundary inclusive
    /// (a sector exactly at the edge counts, up to a relative tolerance).
    pub fn window_probability(&self, center: T, half_width: T) -> T {
        let slack = T::merge_tol() * T::one().max(center.abs()).max(half_width.abs());
        let lo = center - half_width - slack;
        let hi = center + half_width + slack;
        compensated_sum(
            self.values
                .iter()
                .zip(&self.probs)
                .filter(|&(&v, _)| v >= lo && v <= hi)
                .map(|(_, &p)| p),
        )
    }

    /// Index of the first sector belonging to the upper branch of a cut at
    /// `separation`: eigenvalues at or above the cut point are "upper".
    pub fn boundary_index(&self, separation: T) -> usize {
        let slack = T::merge_tol() * T::one().max(separation.abs());
        self.values.partition_point(|&v| v < separation - slack)
    }

    /// Weights of the two branches of a cut: (below, at-or-above).
    pub fn branch_weights(&self, separation: T) -> (T, T) {
        let split = self.boundary_index(separation);
        let below = compensated_sum(self.probs[..split].iter().copied());
        let above = compensated_sum(self.probs[split..].iter().copied());
        (below, above)
    }

    /// Distance between the conditional means of the two branches.
    pub fn branch_mean_distance(&self, separation: T) -> Result<T> {
        let split = self.boundary_index(separation);
        let side = |vals: &[T], ps: &[T]| -> Result<T> {
            let w = compensated_sum(ps.iter().copied());
            if w <= T::split_floor() {
                return Err(Error::DegenerateSplit {
                    separation_point: separation.as_f64(),
                    weight: w.as_f64(),
                    floor: T::split_floor().as_f64(),
                });
            }
            Ok(compensated_sum(vals.iter().zip(ps).map(|(&v, &p)| v * p)) / w)
        };
        let lower = side(&self.values[..split], &self.probs[..split])?;
        let upper = side(&self.values[split..], &self.probs[split..])?;
        Ok((upper - lower).abs())
    }

    /// Distance between the most probable sector of each branch.
    pub fn branch_peak_distance(&self, separation: T) -> Result<T> {
        let split = self.boundary_index(separation);
        let peak = |vals: &[T], ps: &[T]| -> Result<T> {
            let mut best: Option<(T, T)> = None;
            for (&v, &p) in vals.iter().zip(ps) {
                if best.is_none_or(|(bp, _)| p > bp) {
                    best = Some((p, v));
                }
            }
            match best {
                Some((p, v)) if p > T::split_floor() => Ok(v),
                _ => Err(Error::DegenerateSplit {
                    separation_point: separation.as_f64(),
                    weight: 0.0,
                    floor: T::split_floor().as_f64(),
                }),
            }
        };
        let lower = peak(&self.values[..split], &self.probs[..split])?;
        let upper = peak(&self.values[split..], &self.probs[split..])?;
        Ok((upper - lower).abs())
    }

    /// Midpoint of the weighted lower and upper medians; the natural centre
    /// for tie-breaking between separation candidates.
    pub fn median_midpoint(&self) -> T {
        let half = T::of(0.5);
        let slack = T::unit_norm_tol();
        let mut acc = T::zero();
        let mut lower = None;
        let mut upper = None;
        for (&v, &p) in self.values.iter().zip(&self.probs) {
            acc += p;
            if lower.is_none() && acc >= half - slack {
                lower = Some(v);
            }
            if upper.is_none() && acc > half + slack {
                upper = Some(v);
            }
        }
        let lo = lower.unwrap_or(self.values[0]);
        let hi = upper.unwrap_or(self.values[self.values.len() - 1]);
        (lo + hi) * half
    }

    /// Pick the separation point that minimises the window probability while
    /// keeping both branch weights at or above `weight_floor`.
    ///
    /// Candidates are the sector eigenvalues themselves. Ties on the window
    /// weight are broken towards the distribution's median midpoint, then
    /// towards the larger eigenvalue.
    pub fn auto_separation_point(&self, half_width: T, weight_floor: T) -> Result<T> {
        let center = self.median_midpoint();
        let tol = T::unit_norm_tol();
        let mut best: Option<(T, T, T)> = None; // (window weight, |c - center|, c)
        for &c in &self.values {
            let (w1, w2) = self.branch_weights(c);
            if w1 < weight_floor || w2 < weight_floor {
                continue;
            }
            let window = self.window_probability(c, half_width);
            let dist = (c - center).abs();
            let better = match best {
                None => true,
                Some((bw, bd, bc)) => {
                    if (window - bw).abs() > tol {
                        window < bw
                    } else if (dist - bd).abs() > tol {
                        dist < bd
                    } else {
                        c > bc
                    }
                }
            };
            if better {
                best = Some((window, dist, c));
            }
        }
        best.map(|(_, _, c)| c).ok_or(Error::NoSeparationPoint { floor: weight_floor.as_f64() })
    }
}

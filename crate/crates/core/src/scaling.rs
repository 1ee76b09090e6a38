//! Size sweeps and the log-domain fits that turn them into statements:
//! power-law exponents for window weights, exponential rates for product
//! superpositions, and the flat-ratio / soundness checks across Hamiltonian
//! families.
//!
//! Asymptotic claims are fitted, not proven: the smallest sizes are dropped
//! one by one until the window looks clean (r² ≥ [`WINDOW_R2_TARGET`]) or
//! half the points remain, and the window that was actually used travels
//! with the fit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_sectors, AdditiveObservable, ManyBodySpace};
use crate::bounds::{decomposition_bound, ghz_bound, window_bound};
use crate::bounds::{distinguishability_bound, distinguishability_q};
use crate::combin::binomial_exact;
use crate::eigen::{lowest_two, SolveOptions};
use crate::error::Error;
use crate::halfint::HalfInt;
use crate::hamiltonian::{tfim_chain, LocalHamiltonian};
use crate::random::random_klocal;
use crate::scalar::Real;
use crate::split::{auto_split, DEFAULT_WEIGHT_FLOOR};
use crate::squid::{gap_identity_ratio, quartic_double_well, solve_well, Potential1D};
use crate::states::{
    ghz_state, product_state, w_state_distribution, weight_within, SuperpositionConfig,
};
use crate::{Cplx, Result};

/// A window is accepted once the log-domain fit explains this much variance.
/// 0.999 separates "clean asymptote" from "still in the transient" without
/// being fussy about float noise on synthetic data.
pub const WINDOW_R2_TARGET: f64 = 0.999;

/// Below four points a two-parameter fit has no residual worth reporting.
pub const MIN_FIT_POINTS: usize = 4;

// ---------------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------------

/// One swept quantity against size. Sizes are strictly increasing; exact
/// zeros are kept apart from the positive points because the log fits cannot
/// see them (and do not need to — an exact zero is a stronger statement than
/// any decay rate).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct SweepSeries<T: Real> {
    label: String,
    points: Vec<(T, T)>,
    zero_hits: Vec<T>,
    metadata: BTreeMap<String, String>,
}

impl<T: Real> SweepSeries<T> {
    pub fn new(label: impl Into<String>) -> Self {
        SweepSeries {
            label: label.into(),
            points: Vec::new(),
            zero_hits: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_points(label: impl Into<String>, pairs: &[(T, T)]) -> Result<Self> {
        let mut series = Self::new(label);
        for &(size, value) in pairs {
            series.push(size, value)?;
        }
        Ok(series)
    }

    fn last_size(&self) -> Option<T> {
        match (self.points.last(), self.zero_hits.last()) {
            (Some(&(s, _)), Some(&z)) => Some(s.max(z)),
            (Some(&(s, _)), None) => Some(s),
            (None, Some(&z)) => Some(z),
            (None, None) => None,
        }
    }

    /// Append one measurement; sizes must arrive strictly increasing and
    /// values must not be negative.
    pub fn push(&mut self, size: T, value: T) -> Result<()> {
        if let Some(prev) = self.last_size() {
            if size <= prev {
                return Err(Error::UnorderedSizes { prev: prev.as_f64(), next: size.as_f64() });
            }
        }
        if value < T::zero() {
            return Err(Error::NonPositiveSeries { size: size.as_f64(), value: value.as_f64() });
        }
        if value == T::zero() {
            self.zero_hits.push(size);
        } else {
            self.points.push((size, value));
        }
        Ok(())
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.metadata.insert(key.into(), value.into());
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The strictly positive points, size-ascending.
    pub fn points(&self) -> &[(T, T)] {
        &self.points
    }

    /// Sizes whose value was exactly zero.
    pub fn zero_hits(&self) -> &[T] {
        &self.zero_hits
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    /// True when every measured value was exactly zero — the strongest
    /// possible decay, reported as such instead of fitted.
    pub fn is_identically_zero(&self) -> bool {
        self.points.is_empty() && !self.zero_hits.is_empty()
    }

    /// Two-column CSV with all points (zeros included) in size order. Column
    /// names come from the `size_label` / `value_label` metadata keys.
    pub fn render_csv(&self) -> String {
        let size_label = self.metadata.get("size_label").map_or("size", String::as_str);
        let value_label = self.metadata.get("value_label").map_or("value", String::as_str);
        let mut out = format!("{size_label},{value_label}\n");
        let mut p = self.points.iter().peekable();
        let mut z = self.zero_hits.iter().peekable();
        loop {
            let take_zero = match (p.peek(), z.peek()) {
                (Some(&&(s, _)), Some(&&zs)) => zs < s,
                (None, Some(_)) => true,
                (Some(_), None) => false,
                (None, None) => break,
            };
            if take_zero {
                let s = z.next().unwrap();
                let _ = writeln!(out, "{},0", s.as_f64());
            } else {
                let (s, v) = p.next().unwrap();
                let _ = writeln!(out, "{},{}", s.as_f64(), v.as_f64());
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Fits
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// value ∝ size^exponent — fitted as log value against log size.
    PowerLaw,
    /// value ∝ e^(rate · size) — fitted as log value against size.
    Exponential,
}

/// A fitted slope in the log domain, with the window that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct ScalingFit<T: Real> {
    pub model: FitModel,
    /// Power-law exponent or exponential rate.
    pub exponent: T,
    /// Standard error of the slope from the window residuals.
    pub stderr: T,
    pub r_squared: T,
    /// Smallest size that survived the window rule.
    pub window_start_size: T,
    pub points_used: usize,
}

/// Ordinary least squares on prepared (x, y): slope, its standard error, r².
fn line_fit<T: Real>(pts: &[(T, T)]) -> (T, T, T) {
    let n = T::of_usize(pts.len());
    let mx = pts.iter().map(|p| p.0).fold(T::zero(), |a, v| a + v) / n;
    let my = pts.iter().map(|p| p.1).fold(T::zero(), |a, v| a + v) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for &(x, y) in pts {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let ssr = (syy - slope * sxy).max(T::zero());
    let r2 = if syy <= T::zero() {
        T::one()
    } else {
        (T::one() - ssr / syy).clamp(T::zero(), T::one())
    };
    let dof = pts.len().saturating_sub(2);
    let stderr = if dof == 0 {
        T::zero()
    } else {
        (ssr / (T::of_usize(dof) * sxx)).sqrt()
    };
    (slope, stderr, r2)
}

fn fit_with_window<T: Real>(series: &SweepSeries<T>, model: FitModel) -> Result<ScalingFit<T>> {
    let raw = series.points();
    if raw.len() < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints {
            label: series.label().to_string(),
            got: raw.len(),
            min: MIN_FIT_POINTS,
        });
    }
    let mut pts = Vec::with_capacity(raw.len());
    for &(s, v) in raw {
        let x = match model {
            FitModel::PowerLaw => {
                if s <= T::zero() {
                    return Err(Error::InvalidParameter(format!(
                        "power-law fits need positive sizes, got {}",
                        s.as_f64()
                    )));
                }
                s.ln()
            }
            FitModel::Exponential => s,
        };
        pts.push((x, v.ln()));
    }
    // Drop the smallest sizes until the window is clean or half the points
    // remain, whichever comes first.
    let min_keep = MIN_FIT_POINTS.max(pts.len().div_ceil(2));
    let target = T::of(WINDOW_R2_TARGET);
    let mut start = 0usize;
    let (mut slope, mut stderr, mut r2) = line_fit(&pts);
    while r2 < target && pts.len() - (start + 1) >= min_keep {
        start += 1;
        (slope, stderr, r2) = line_fit(&pts[start..]);
    }
    Ok(ScalingFit {
        model,
        exponent: slope,
        stderr,
        r_squared: r2,
        window_start_size: raw[start].0,
        points_used: raw.len() - start,
    })
}

/// Fit log value against log size: the exponent of an algebraic decay.
pub fn fit_power_law<T: Real>(series: &SweepSeries<T>) -> Result<ScalingFit<T>> {
    fit_with_window(series, FitModel::PowerLaw)
}

/// Fit log value against size: the rate of an exponential decay.
pub fn fit_exponential<T: Real>(series: &SweepSeries<T>) -> Result<ScalingFit<T>> {
    fit_with_window(series, FitModel::Exponential)
}

/// Largest K with exponent < −K − 0.1, the margin used to call a window
/// weight "too small at order K". None when not even K = 1 clears.
pub fn excluded_at_order<T: Real>(exponent: T) -> Option<u32> {
    let e = exponent.as_f64();
    let mut k = 0u32;
    while k < 64 && e < -f64::from(k + 1) - 0.1 {
        k += 1;
    }
    (k > 0).then_some(k)
}

/// Human-readable summary of a series and (optionally) its fit.
pub fn render_report<T: Real>(series: &SweepSeries<T>, fit: Option<&ScalingFit<T>>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "series: {}", series.label());
    let pts = series.points();
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        let _ = writeln!(
            out,
            "  {} positive points, sizes {} to {}",
            pts.len(),
            first.0.as_f64(),
            last.0.as_f64()
        );
    }
    if !series.zero_hits().is_empty() {
        let _ = writeln!(out, "  {} exact-zero hits", series.zero_hits().len());
    }
    for (key, value) in series.metadata() {
        let _ = writeln!(out, "  {key}: {value}");
    }
    if series.is_identically_zero() {
        let _ = writeln!(
            out,
            "  identically zero in window — nothing to fit; the quantity vanishes outright"
        );
        return out;
    }
    if let Some(f) = fit {
        let (name, slope_word) = match f.model {
            FitModel::PowerLaw => ("power-law", "exponent"),
            FitModel::Exponential => ("exponential", "rate"),
        };
        let _ = writeln!(
            out,
            "  {name} fit: {slope_word} {:.6} ± {:.2e}, r² = {:.6}",
            f.exponent.as_f64(),
            f.stderr.as_f64(),
            f.r_squared.as_f64()
        );
        let _ = writeln!(
            out,
            "  window: {} points from size {}",
            f.points_used,
            f.window_start_size.as_f64()
        );
        if f.model == FitModel::PowerLaw {
            if let Some(k) = excluded_at_order(f.exponent) {
                let _ = writeln!(out, "  excluded at order {k} (exponent below -{k} - 0.1)");
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// What to extract from a solved Hamiltonian at each size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepValue {
    ExactGap,
    WindowBound,
    DecompositionBound,
    SeparationProbability,
}

impl SweepValue {
    fn label(self) -> &'static str {
        match self {
            SweepValue::ExactGap => "gap",
            SweepValue::WindowBound | SweepValue::DecompositionBound => "bound",
            SweepValue::SeparationProbability => "P_sep",
        }
    }
}

/// Additive observable used to split ground states in Hamiltonian sweeps.
/// Only the spin-z sector structure is wired up; the enum keeps the config
/// key explicit and extensible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    #[default]
    SpinZ,
}

impl ObservableKind {
    fn build(self) -> AdditiveObservable<f64> {
        match self {
            ObservableKind::SpinZ => AdditiveObservable::spin_z(),
        }
    }
}

fn default_w_center() -> f64 {
    0.5
}

fn default_width() -> f64 {
    2.0
}

fn default_unit() -> f64 {
    1.0
}

/// One sweep recipe; `family` tags the JSON form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SweepConfig {
    /// W-state window weight against integer j, in the collective basis.
    WState {
        sizes: Vec<i64>,
        #[serde(default = "default_w_center")]
        center: f64,
        #[serde(default = "default_width")]
        half_width: f64,
    },
    /// Dicke-superposition window weight against integer j.
    DickeSuperposition {
        spec: SuperpositionConfig,
        sizes: Vec<i64>,
        #[serde(default)]
        center: f64,
        #[serde(default = "default_width")]
        half_width: f64,
    },
    /// ω^(N−K)·h21k against N — the product-superposition matrix-element
    /// bound with the binomial interaction count divided out, so the fitted
    /// rate is ln ω itself.
    GhzRate {
        omega: f64,
        k: usize,
        #[serde(default = "default_unit")]
        h21k: f64,
        sizes: Vec<i64>,
    },
    /// q^(Ñ−K) against Ñ for one distinguishability setting.
    DistinguishabilityRate {
        p1_plus: f64,
        p2_plus: f64,
        k: usize,
        sizes: Vec<i64>,
    },
    /// Transverse-field Ising chains against N.
    TfimChain {
        coupling: f64,
        field: f64,
        #[serde(default)]
        periodic: bool,
        #[serde(default)]
        observable: ObservableKind,
        #[serde(rename = "bound")]
        value: SweepValue,
        sizes: Vec<i64>,
    },
    /// One random 2-local qubit instance per size (N interaction terms,
    /// instance seed = `seed` xor N), so two sweeps with the same seed see
    /// the same Hamiltonians.
    RandomTwoLocal {
        seed: u64,
        #[serde(default)]
        observable: ObservableKind,
        #[serde(rename = "bound")]
        value: SweepValue,
        sizes: Vec<i64>,
    },
    /// Double-well tunnelling gap against barrier height β (sizes are β
    /// values here), on a fixed symmetric grid.
    QuarticWell {
        mass_scale: f64,
        half_width: f64,
        points: usize,
        value: WellValue,
        sizes: Vec<i64>,
    },
}

/// What to read off a solved double well.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellValue {
    Gap,
    IdentityRatio,
    CenterAmplitude,
}

impl WellValue {
    fn label(self) -> &'static str {
        match self {
            WellValue::Gap => "gap",
            WellValue::IdentityRatio => "ratio",
            WellValue::CenterAmplitude => "psi0_at_0",
        }
    }
}

impl SweepConfig {
    pub fn sizes(&self) -> &[i64] {
        match self {
            SweepConfig::WState { sizes, .. }
            | SweepConfig::DickeSuperposition { sizes, .. }
            | SweepConfig::GhzRate { sizes, .. }
            | SweepConfig::DistinguishabilityRate { sizes, .. }
            | SweepConfig::TfimChain { sizes, .. }
            | SweepConfig::RandomTwoLocal { sizes, .. }
            | SweepConfig::QuarticWell { sizes, .. } => sizes,
        }
    }
}

/// A finished (or cut-short) sweep: whatever completed, plus the reason the
/// rest is missing.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: serde::de::DeserializeOwned"))]
pub struct SweepOutcome<T: Real> {
    pub series: SweepSeries<T>,
    /// Set when an upstream error stopped the sweep; the series then holds
    /// the sizes that did complete.
    pub aborted: Option<String>,
}

fn to_count(size: i64) -> Result<usize> {
    usize::try_from(size)
        .map_err(|_| Error::InvalidParameter(format!("size {size} must be nonnegative")))
}

fn collect_sweep(
    label: &str,
    sizes: &[i64],
    metadata: &[(&str, &str)],
    mut eval: impl FnMut(i64) -> Result<f64>,
) -> Result<SweepOutcome<f64>> {
    if sizes.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut series = SweepSeries::new(label);
    for &(key, value) in metadata {
        series = series.with_metadata(key, value);
    }
    let mut aborted = None;
    for &size in sizes {
        match eval(size) {
            Ok(value) => series.push(size as f64, value)?,
            Err(err) => {
                aborted = Some(format!("size {size}: {err}"));
                break;
            }
        }
    }
    Ok(SweepOutcome { series, aborted })
}

/// Ground pair, sector split under the chosen observable, and the requested
/// scalar.
fn spectrum_point(
    h: &LocalHamiltonian<f64>,
    observable: ObservableKind,
    value: SweepValue,
) -> Result<f64> {
    let pair = lowest_two(h, &SolveOptions::default())?;
    if value == SweepValue::ExactGap {
        return Ok(pair.gap);
    }
    let sectors = enumerate_sectors(h.space(), &observable.build())?;
    let half_width = 2.0 * sectors.site_span();
    let split = auto_split(&pair.ground, &sectors, half_width, DEFAULT_WEIGHT_FLOOR)?;
    match value {
        SweepValue::ExactGap => unreachable!("handled above"),
        SweepValue::WindowBound => Ok(window_bound(h, &split, &h.term_norms())?.bound_value),
        SweepValue::DecompositionBound => {
            Ok(decomposition_bound(h, &split.decomposition(), pair.e0)?.bound_value)
        }
        SweepValue::SeparationProbability => Ok(split.separation_probability(half_width)),
    }
}

/// Run one configured sweep. Configuration problems (empty size list, bad
/// spec) error out immediately; a failure at some size returns the completed
/// prefix with `aborted` set.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome<f64>> {
    match config {
        SweepConfig::WState { sizes, center, half_width } => {
            let (c, w) = (*center, *half_width);
            collect_sweep(
                "w-state window weight",
                sizes,
                &[("size_label", "j"), ("value_label", "P_sep")],
                |size| {
                    let dist = w_state_distribution::<f64>(HalfInt::from_int(size))?;
                    Ok(weight_within(&dist, c, w))
                },
            )
        }
        SweepConfig::DickeSuperposition { spec, sizes, center, half_width } => {
            let spec = spec.to_spec::<f64>()?;
            let (c, w) = (*center, *half_width);
            collect_sweep(
                "dicke-superposition window weight",
                sizes,
                &[("size_label", "j"), ("value_label", "P_sep")],
                |size| {
                    let dist = spec.distribution(HalfInt::from_int(size))?;
                    Ok(weight_within(&dist, c, w))
                },
            )
        }
        SweepConfig::GhzRate { omega, k, h21k, sizes } => {
            let (omega, k, h21k) = (*omega, *k, *h21k);
            collect_sweep(
                "product-superposition bound rate",
                sizes,
                &[
                    ("size_label", "N"),
                    ("value_label", "rate_value"),
                    ("prefactor", "binomial interaction count divided out"),
                ],
                |size| {
                    let n = to_count(size)?;
                    let bound = ghz_bound(n, k, omega, h21k)?;
                    Ok(bound / binomial_exact(n as u64, k as u64) as f64)
                },
            )
        }
        SweepConfig::DistinguishabilityRate { p1_plus, p2_plus, k, sizes } => {
            let q = distinguishability_q(*p1_plus, *p2_plus)?;
            let k = *k;
            collect_sweep(
                "distinguishability bound rate",
                sizes,
                &[("size_label", "N_tilde"), ("value_label", "rate_value")],
                |size| distinguishability_bound(q, to_count(size)?, k, 1, 1.0),
            )
        }
        SweepConfig::TfimChain { coupling, field, periodic, observable, value, sizes } => {
            let (coupling, field, periodic) = (*coupling, *field, *periodic);
            let (observable, value) = (*observable, *value);
            collect_sweep(
                "transverse-field chain",
                sizes,
                &[("size_label", "N"), ("value_label", value.label())],
                |size| {
                    let h = tfim_chain(to_count(size)?, coupling, field, periodic)?;
                    spectrum_point(&h, observable, value)
                },
            )
        }
        SweepConfig::RandomTwoLocal { seed, observable, value, sizes } => {
            let (seed, observable, value) = (*seed, *observable, *value);
            collect_sweep(
                "random 2-local ensemble",
                sizes,
                &[("size_label", "N"), ("value_label", value.label())],
                |size| {
                    let n = to_count(size)?;
                    let h = random_klocal::<f64>(n, 2, 2, n, seed ^ size as u64)?;
                    spectrum_point(&h, observable, value)
                },
            )
        }
        SweepConfig::QuarticWell { mass_scale, half_width, points, value, sizes } => {
            let (mass, hw, pts, value) = (*mass_scale, *half_width, *points, *value);
            collect_sweep(
                "quartic double well",
                sizes,
                &[("size_label", "beta"), ("value_label", value.label())],
                |size| {
                    let beta = size as f64;
                    let pot = Potential1D::symmetric(quartic_double_well(beta), hw, pts)?;
                    let sol = solve_well(&pot, mass)?;
                    match value {
                        WellValue::Gap => Ok(sol.gap()),
                        WellValue::IdentityRatio => gap_identity_ratio(&sol),
                        WellValue::CenterAmplitude => Ok(sol
                            .psi0_at_0()
                            .expect("symmetric potential always has a center sample")),
                    }
                },
            )
        }
    }
}

/// A sweep plus the fit to run on it — the JSON shape the CLI consumes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepJob {
    #[serde(flatten)]
    pub config: SweepConfig,
    #[serde(default)]
    pub fit: Option<FitModel>,
}

// ---------------------------------------------------------------------------
// Region distances
// ---------------------------------------------------------------------------

/// Families with a canonical two-region structure, for distance-vs-size
/// sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceFamily {
    /// Corner superposition (all-down + all-up) under spin-z; sizes are N.
    GhzZ,
    /// W state under the rotated collective observable; sizes are N = 2j.
    WStateX,
    /// All-up product state under spin-z — single sector, splits must fail.
    ProductZ,
}

fn qubit_ket(level: usize) -> DVector<Cplx<f64>> {
    DVector::from_fn(2, |i, _| {
        if i == level { Cplx::new(1.0, 0.0) } else { Cplx::new(0.0, 0.0) }
    })
}

/// Peak-to-peak distance of a ladder distribution cut at `boundary`.
fn ladder_peak_distance(dist: &[(HalfInt, f64)], boundary: f64) -> Result<f64> {
    let mut lower: Option<(f64, f64)> = None;
    let mut upper: Option<(f64, f64)> = None;
    for &(m, p) in dist {
        let v = m.value::<f64>();
        let slot = if v < boundary { &mut lower } else { &mut upper };
        if slot.is_none_or(|(bp, _)| p > bp) {
            *slot = Some((p, v));
        }
    }
    match (lower, upper) {
        (Some((_, lo)), Some((_, hi))) => Ok(hi - lo),
        _ => Err(Error::InvalidParameter(
            "distribution has no weight on one side of the cut".into(),
        )),
    }
}

/// Distance between the two outcome-region peaks, per size.
pub fn region_distance_series(family: DistanceFamily, sizes: &[i64]) -> Result<SweepSeries<f64>> {
    if sizes.is_empty() {
        return Err(Error::EmptySweep);
    }
    let mut series = match family {
        DistanceFamily::GhzZ => SweepSeries::new("corner-superposition region distance")
            .with_metadata("observable", "spin_z"),
        DistanceFamily::WStateX => SweepSeries::new("w-state region distance")
            .with_metadata("observable", "rotated collective spin"),
        DistanceFamily::ProductZ => {
            SweepSeries::new("product-state region distance").with_metadata("observable", "spin_z")
        }
    }
    .with_metadata("size_label", "N")
    .with_metadata("value_label", "region_distance");
    for &size in sizes {
        let n = to_count(size)?;
        let value = match family {
            DistanceFamily::GhzZ => {
                let sup = ghz_state(n, &qubit_ket(0), &qubit_ket(1), 0.0)?;
                let space = ManyBodySpace::qubits(n)?;
                let sectors = enumerate_sectors(&space, &AdditiveObservable::spin_z())?;
                let half_width = 2.0 * sectors.site_span();
                let split = auto_split(sup.state(), &sectors, half_width, DEFAULT_WEIGHT_FLOOR)?;
                split.region_peak_distance
            }
            DistanceFamily::ProductZ => {
                let state = product_state(n, &qubit_ket(1))?;
                let space = ManyBodySpace::qubits(n)?;
                let sectors = enumerate_sectors(&space, &AdditiveObservable::spin_z())?;
                let half_width = 2.0 * sectors.site_span();
                let split =
                    auto_split(&state, &sectors, half_width, DEFAULT_WEIGHT_FLOOR)?;
                split.region_peak_distance
            }
            DistanceFamily::WStateX => {
                let dist = w_state_distribution::<f64>(HalfInt::from_doubled(size))?;
                ladder_peak_distance(&dist, 0.0)?
            }
        };
        series.push(size as f64, value)?;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::SOUNDNESS_SLACK;
    use crate::states::Sign;

    fn synthetic_power(sizes: std::ops::RangeInclusive<i64>, exponent: f64) -> SweepSeries<f64> {
        let pairs: Vec<(f64, f64)> =
            sizes.map(|s| (s as f64, (s as f64).powf(exponent))).collect();
        SweepSeries::from_points("synthetic", &pairs).unwrap()
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let fit = fit_power_law(&synthetic_power(2..=12, -1.5)).unwrap();
        assert!(
            (fit.exponent + 1.5).abs() < 1e-10,
            "exponent {} should be -1.5",
            fit.exponent
        );
        assert!(fit.stderr < 1e-10, "stderr {} on exact data", fit.stderr);
        assert!(fit.r_squared > 1.0 - 1e-12);
        assert_eq!(fit.points_used, 11, "clean data keeps the full window");
    }

    #[test]
    fn exact_exponential_is_recovered() {
        let pairs: Vec<(f64, f64)> = (3..=10).map(|s| (s as f64, 0.8f64.powi(s))).collect();
        let series = SweepSeries::from_points("decay", &pairs).unwrap();
        let fit = fit_exponential(&series).unwrap();
        assert!(
            (fit.exponent - 0.8f64.ln()).abs() < 1e-10,
            "rate {} should be ln 0.8",
            fit.exponent
        );
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn window_rule_drops_a_polluted_head() {
        let mut pairs: Vec<(f64, f64)> =
            (4..=13).map(|s| (s as f64, (s as f64).powi(-2))).collect();
        pairs[0].1 *= 3.0;
        pairs[1].1 *= 2.0;
        let series = SweepSeries::from_points("polluted", &pairs).unwrap();
        let fit = fit_power_law(&series).unwrap();
        assert_eq!(fit.points_used, 8, "the two bad points must fall out");
        assert_eq!(fit.window_start_size, 6.0);
        assert!((fit.exponent + 2.0).abs() < 1e-12);
    }

    #[test]
    fn window_rule_stops_at_half() {
        let pairs: Vec<(f64, f64)> = (4..=13)
            .map(|s| {
                let noise = if s % 2 == 0 { 1.2 } else { 0.8 };
                (s as f64, (s as f64).powi(-2) * noise)
            })
            .collect();
        let series = SweepSeries::from_points("noisy", &pairs).unwrap();
        let fit = fit_power_law(&series).unwrap();
        assert_eq!(fit.points_used, 5, "never below half the points");
        assert!(fit.r_squared < WINDOW_R2_TARGET, "honest r² on noisy data");
    }

    #[test]
    fn series_construction_guards() {
        let mut series = SweepSeries::<f64>::new("guards");
        series.push(4.0, 1.0).unwrap();
        assert!(matches!(
            series.push(4.0, 0.5),
            Err(Error::UnorderedSizes { .. })
        ));
        assert!(matches!(
            series.push(5.0, -0.5),
            Err(Error::NonPositiveSeries { .. })
        ));
        series.push(5.0, 0.0).unwrap();
        series.push(6.0, 0.25).unwrap();
        assert_eq!(series.points().len(), 2);
        assert_eq!(series.zero_hits(), &[5.0]);
        assert!(!series.is_identically_zero());

        let mut zeros = SweepSeries::<f64>::new("all-zero");
        zeros.push(2.0, 0.0).unwrap();
        zeros.push(3.0, 0.0).unwrap();
        assert!(zeros.is_identically_zero());
        assert!(matches!(
            fit_power_law(&zeros),
            Err(Error::TooFewPoints { got: 0, .. })
        ));
        let report = render_report(&zeros, None);
        assert!(report.contains("identically zero"), "report: {report}");
    }

    #[test]
    fn csv_interleaves_zero_hits_in_order() {
        let mut series = SweepSeries::<f64>::new("csv")
            .with_metadata("size_label", "N")
            .with_metadata("value_label", "gap");
        series.push(2.0, 0.5).unwrap();
        series.push(3.0, 0.0).unwrap();
        series.push(4.0, 0.125).unwrap();
        assert_eq!(series.render_csv(), "N,gap\n2,0.5\n3,0\n4,0.125\n");
    }

    #[test]
    fn exclusion_orders_follow_the_margin() {
        assert_eq!(excluded_at_order(-3.05), Some(2));
        assert_eq!(excluded_at_order(-3.2), Some(3));
        assert_eq!(excluded_at_order(-1.5), Some(1));
        assert_eq!(excluded_at_order(-0.5), None);
        assert_eq!(excluded_at_order(-2.1), Some(1), "margin is strict");
        assert_eq!(excluded_at_order(0.7), None);
    }

    #[test]
    fn w_state_sweep_decays_like_j_to_three_halves() {
        let config = SweepConfig::WState {
            sizes: vec![20, 40, 80, 120, 160, 200],
            center: default_w_center(),
            half_width: default_width(),
        };
        let outcome = run_sweep(&config).unwrap();
        assert!(outcome.aborted.is_none());
        let points = outcome.series.points();
        assert_eq!(points.len(), 6);
        for w in points.windows(2) {
            assert!(
                w[1].1 < w[0].1 && w[1].1 > 0.0,
                "window weight must decrease and stay positive"
            );
        }
        let fit = fit_power_law(&outcome.series).unwrap();
        assert!(
            (fit.exponent + 1.5).abs() <= 0.1,
            "w-state window exponent {:.4}",
            fit.exponent
        );
    }

    #[test]
    fn superposition_sweep_is_excluded_at_order_two() {
        let spec = SuperpositionConfig {
            sign: Sign::Minus,
            coefficients: vec![
                [std::f64::consts::FRAC_1_SQRT_2, 0.0],
                [-std::f64::consts::FRAC_1_SQRT_2, 0.0],
            ],
        };
        let config = SweepConfig::DickeSuperposition {
            spec,
            sizes: vec![20, 40, 80, 120, 160, 200],
            center: 0.0,
            half_width: 2.0,
        };
        let outcome = run_sweep(&config).unwrap();
        assert!(outcome.aborted.is_none());
        let fit = fit_power_law(&outcome.series).unwrap();
        assert!(
            fit.exponent <= -2.8,
            "superposition window exponent {:.4} should be ~ -3",
            fit.exponent
        );
        assert_eq!(excluded_at_order(fit.exponent), Some(2));
    }

    #[test]
    fn ghz_rate_sweep_recovers_ln_omega() {
        for omega in [0.5, 0.8, 0.95] {
            let config = SweepConfig::GhzRate {
                omega,
                k: 2,
                h21k: 1.0,
                sizes: (30..=100).step_by(10).collect(),
            };
            let outcome = run_sweep(&config).unwrap();
            let fit = fit_exponential(&outcome.series).unwrap();
            assert!(
                (fit.exponent - omega.ln()).abs() < 1e-6,
                "ω = {omega}: rate {} vs ln ω {}",
                fit.exponent,
                omega.ln()
            );
        }
    }

    #[test]
    fn distinguishability_rate_sweep_recovers_ln_q() {
        let config = SweepConfig::DistinguishabilityRate {
            p1_plus: 0.9,
            p2_plus: 0.1,
            k: 2,
            sizes: (30..=100).step_by(10).collect(),
        };
        let outcome = run_sweep(&config).unwrap();
        let fit = fit_exponential(&outcome.series).unwrap();
        // q = √(0.9·0.1) + √(0.1·0.9) = 0.6.
        assert!(
            (fit.exponent - 0.6f64.ln()).abs() < 1e-6,
            "rate {} vs ln 0.6",
            fit.exponent
        );
    }

    #[test]
    fn empty_size_lists_are_rejected() {
        let config = SweepConfig::WState {
            sizes: vec![],
            center: 0.5,
            half_width: 2.0,
        };
        assert!(matches!(run_sweep(&config), Err(Error::EmptySweep)));
        assert!(matches!(
            region_distance_series(DistanceFamily::GhzZ, &[]),
            Err(Error::EmptySweep)
        ));
    }

    #[test]
    fn sweeps_are_deterministic() {
        let config = SweepConfig::RandomTwoLocal {
            seed: 7,
            observable: ObservableKind::SpinZ,
            value: SweepValue::ExactGap,
            sizes: vec![4, 5, 6],
        };
        let a = run_sweep(&config).unwrap();
        let b = run_sweep(&config).unwrap();
        assert_eq!(a.series.points(), b.series.points(), "bit-identical reruns");
    }

    #[test]
    fn bound_series_stays_above_gap_series_on_a_gapped_family() {
        let sizes: Vec<i64> = (4..=9).collect();
        let gap_cfg = SweepConfig::TfimChain {
            coupling: 1.0,
            field: 1.5,
            periodic: false,
            observable: ObservableKind::SpinZ,
            value: SweepValue::ExactGap,
            sizes: sizes.clone(),
        };
        let bound_cfg = SweepConfig::TfimChain {
            coupling: 1.0,
            field: 1.5,
            periodic: false,
            observable: ObservableKind::SpinZ,
            value: SweepValue::WindowBound,
            sizes,
        };
        let gaps = run_sweep(&gap_cfg).unwrap();
        let bounds = run_sweep(&bound_cfg).unwrap();
        assert!(gaps.aborted.is_none() && bounds.aborted.is_none());
        assert_eq!(gaps.series.points().len(), bounds.series.points().len());
        for (&(n, gap), &(n2, bound)) in
            gaps.series.points().iter().zip(bounds.series.points())
        {
            assert_eq!(n, n2);
            assert!(
                bound >= gap - SOUNDNESS_SLACK,
                "N = {n}: bound {bound:.6e} under gap {gap:.6e}"
            );
        }
    }

    #[test]
    fn sweep_jobs_round_trip_as_json() {
        let json = r#"{
            "family": "ghz_rate",
            "omega": 0.8,
            "k": 2,
            "sizes": [30, 40, 50, 60],
            "fit": "exponential"
        }"#;
        let job: SweepJob = serde_json::from_str(json).unwrap();
        assert_eq!(job.fit, Some(FitModel::Exponential));
        match &job.config {
            SweepConfig::GhzRate { omega, k, h21k, sizes } => {
                assert_eq!((*omega, *k, *h21k), (0.8, 2, 1.0));
                assert_eq!(sizes, &[30, 40, 50, 60]);
            }
            other => panic!("wrong family parsed: {other:?}"),
        }
        let back = serde_json::to_string(&job).unwrap();
        assert!(back.contains("\"family\":\"ghz_rate\""), "tag survives: {back}");

        let chain = r#"{
            "family": "tfim_chain",
            "coupling": 1.0,
            "field": 1.5,
            "observable": "spin_z",
            "bound": "window_bound",
            "sizes": [4, 6, 8],
            "fit": "power_law"
        }"#;
        let job: SweepJob = serde_json::from_str(chain).unwrap();
        match &job.config {
            SweepConfig::TfimChain { observable, value, .. } => {
                assert_eq!(*observable, ObservableKind::SpinZ);
                assert_eq!(*value, SweepValue::WindowBound);
            }
            other => panic!("wrong family parsed: {other:?}"),
        }
    }

    #[test]
    fn corner_superposition_distance_is_exactly_n() {
        let series = region_distance_series(DistanceFamily::GhzZ, &[3, 4, 5, 6, 7, 8]).unwrap();
        for &(n, delta) in series.points() {
            assert_eq!(delta, n, "corner superposition distance at N = {n}");
        }
    }

    #[test]
    fn w_state_distance_approaches_sqrt_two_n() {
        let series = region_distance_series(DistanceFamily::WStateX, &[400]).unwrap();
        let (n, delta) = series.points()[0];
        let target = (2.0 * n).sqrt();
        assert!(
            (delta / target - 1.0).abs() < 0.05,
            "Δ = {delta} vs √(2N) = {target:.3}"
        );
    }

    #[test]
    fn single_sector_states_cannot_split() {
        assert!(matches!(
            region_distance_series(DistanceFamily::ProductZ, &[6]),
            Err(Error::NoSeparationPoint { .. })
        ));
    }
}

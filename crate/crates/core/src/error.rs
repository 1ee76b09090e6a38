//! One error enum for the whole crate. Variants carry the numbers a caller
//! needs to either fix the input or report the failure; nothing panics on bad
//! user data.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    // ---- spaces & observables ----------------------------------------
    #[error("local dimension must be at least 2, got {0}")]
    BadSiteDimension(usize),

    #[error("need at least one site, got 0")]
    NoSites,

    #[error("d^N = {d}^{n} exceeds the supported basis size of 2^{max_log2}")]
    SpaceTooLarge { d: usize, n: usize, max_log2: u32 },

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("observable is for local dimension {observable_d}, space has {space_d}")]
    ObservableMismatch { observable_d: usize, space_d: usize },

    #[error("state has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not normalised: ‖ψ‖ = {norm:.3e} differs from 1 beyond {tol:.1e}")]
    Unnormalized { norm: f64, tol: f64 },

    // ---- Hamiltonians --------------------------------------------------
    #[error("interaction support {0:?} must be strictly increasing site indices")]
    InvalidSupport(Vec<usize>),

    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("two interaction terms share the support {0:?}")]
    DuplicateSupport(Vec<usize>),

    #[error("block on support {support:?} is {rows}×{cols}, expected {expected}×{expected}")]
    BlockSizeMismatch { support: Vec<usize>, rows: usize, cols: usize, expected: usize },

    #[error("block on support {support:?} is not Hermitian: max deviation {defect:.3e}")]
    NonHermitianBlock { support: Vec<usize>, defect: f64 },

    #[error("{count} interaction terms exceed the {max} supports available at order {order}")]
    TooManyTerms { count: usize, max: u128, order: usize },

    #[error("operation needs a {needed}-local Hamiltonian, this one has order {got}")]
    WrongOrder { needed: usize, got: usize },

    #[error("Hamiltonian has no interaction terms")]
    NoTerms,

    // ---- eigensolving ---------------------------------------------------
    #[error("spectral gap is undefined in a one-dimensional space")]
    DimensionOne,

    #[error(
        "eigensolver did not reach residual {target:.1e} within {iterations} \
         matrix applications (best achieved {achieved:.1e})"
    )]
    NotConverged { target: f64, achieved: f64, iterations: usize },

    // ---- splitting ------------------------------------------------------
    #[error(
        "split at {separation_point} leaves branch weight {weight:.3e} below \
         the floor {floor:.1e}; the state does not straddle that point"
    )]
    DegenerateSplit { separation_point: f64, weight: f64, floor: f64 },

    #[error("no separation point keeps both branch weights above {floor}")]
    NoSeparationPoint { floor: f64 },

    #[error("branch overlap |λ| = {overlap} is too close to 1 for a meaningful bound")]
    OverlapTooLarge { overlap: f64 },

    #[error("probability {value} for {name} must lie in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("{0}")]
    InvalidParameter(String),

    // ---- special states ---------------------------------------------------
    #[error("invalid state specification: {0}")]
    InvalidSpec(String),

    #[error("cannot parse {input:?} as an integer or half-integer")]
    InvalidHalfInt { input: String },

    // ---- 1-D wells ---------------------------------------------------------
    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { got: usize, min: usize },

    #[error("potential is not finite at Φ = {at}")]
    NonFinitePotential { at: f64 },

    #[error(
        "wavefunction reaches {leakage:.3e} of its peak at the grid edge; \
         the box [{lo}, {hi}] is too narrow for this state"
    )]
    GridTooNarrow { leakage: f64, lo: f64, hi: f64 },

    #[error("operation requires a symmetric potential sampled on a symmetric grid")]
    NotSymmetric,

    // ---- sweeps & fits -------------------------------------------------------
    #[error("sweep produced no data points")]
    EmptySweep,

    #[error("series {label:?} needs at least {min} positive points for a fit, got {got}")]
    TooFewPoints { label: String, got: usize, min: usize },

    #[error("series value at size {size} is {value}; fits need strictly positive data")]
    NonPositiveSeries { size: f64, value: f64 },

    #[error("sweep sizes must be strictly increasing; {prev} is followed by {next}")]
    UnorderedSizes { prev: f64, next: f64 },

    // ---- i/o ------------------------------------------------------------------
    #[error("malformed configuration: {0}")]
    BadConfig(String),
}

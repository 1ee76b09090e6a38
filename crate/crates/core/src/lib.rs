//! Gap certificates for K-local spin Hamiltonians whose ground states split
//! into macroscopically distinct branches of an additive observable.
//!
//! The crate is organised as a pipeline:
//!
//! 1. [`basis`] — many-body bookkeeping: site spaces, additive observables
//!    `S = Σᵢ Sᵢ`, and the eigenvalue sectors they induce.
//! 2. [`hamiltonian`] — K-local operators assembled from dense Hermitian
//!    blocks on interaction supports, applied term-locally (no global sparse
//!    matrix is ever stored).
//! 3. [`eigen`] — the two lowest eigenpairs: dense Hermitian solve for small
//!    dimensions, seeded Lanczos with full reorthogonalisation above.
//! 4. [`split`] / [`bounds`] — cut a state at a separation point of the
//!    observable into ψ = a₁ψ₁ + a₂ψ₂ and evaluate gap upper bounds, each
//!    packaged as a [`bounds::GapCertificate`].
//! 5. [`states`] — closed-form special states (N-fold product superpositions,
//!    Dicke states and their superpositions) together with the Jacobi /
//!    Wigner-d kernels behind their outcome distributions.
//! 6. [`squid`] — finite-difference solver for 1-D symmetric double wells and
//!    the gap–amplitude identity check.
//! 7. [`scaling`] — size sweeps with power-law / exponential fits.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`]
//! (f32 and f64 are provided); the aliases below pin the f64 instantiation
//! used by the command-line tools. Observable eigenvalues may be supplied as
//! exact rationals, in which case sector bookkeeping never touches floats.

pub mod basis;
pub mod bounds;
pub mod combin;
pub mod eigen;
pub mod error;
pub mod halfint;
pub mod hamiltonian;
pub mod random;
pub mod scalar;
pub mod scaling;
pub mod split;
pub mod squid;
pub mod states;
pub mod tridiag;

pub use error::Error;
pub use halfint::HalfInt;
pub use scalar::Real;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex number over the crate's generic scalar.
pub type Cplx<T> = num_complex::Complex<T>;
/// Dense many-body state vector.
pub type State<T> = nalgebra::DVector<Cplx<T>>;

// ---------------------------------------------------------------------------
// Concrete f64 aliases — the working precision of the shipped binaries.
// ---------------------------------------------------------------------------

pub type Cplx64 = Cplx<f64>;
pub type State64 = State<f64>;
pub type Observable64 = basis::AdditiveObservable<f64>;
pub type Sectors64 = basis::SectorIndex<f64>;
pub type Distribution64 = basis::SectorDistribution<f64>;
pub type Hamiltonian64 = hamiltonian::LocalHamiltonian<f64>;
pub type NormReport64 = hamiltonian::NormReport<f64>;
pub type Spectral64 = eigen::SpectralPair<f64>;
pub type Split64 = split::GroundStateSplit<f64>;
pub type Well64 = squid::WellSolution<f64>;
pub type Series64 = scaling::SweepSeries<f64>;
pub type Fit64 = scaling::ScalingFit<f64>;

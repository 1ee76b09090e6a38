//! Closed-form state families and the rotation machinery they share.
//!
//! Everything here lives either in the full 2^N computational basis (product
//! superpositions, small-N Dicke states) or in the (2j+1)-dimensional
//! collective basis (everything indexed by angular momentum). The collective
//! route is what makes j = 200 sweeps affordable; the full-space route stays
//! around as the small-N oracle.

pub mod dicke;
pub mod ghz;
pub mod superposition;
pub mod wigner;
pub mod wstate;

pub use dicke::{dicke_state, rotation_matrix, DickeVector};
pub use ghz::{ghz_state, product_state, ProductSuperposition};
pub use superposition::{moments, weight_within, DickeSuperpositionSpec, Sign, SuperpositionConfig};
pub use wigner::{asymptotic_overlap, jacobi_polynomial, wigner_d, wigner_d_matrix, wigner_d_row};
pub use wstate::{w_state_distribution, w_state_overlap_magnitudes};

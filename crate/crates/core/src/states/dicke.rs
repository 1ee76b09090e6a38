//! Collective angular momentum: Dicke states in the full 2^N basis, the
//! spin-j operator matrices in the (2j+1)-dimensional collective basis, and
//! the rotation matrix exp(−iθĴ_y) obtained by diagonalizing Ĵ_y.
//!
//! The rotation here deliberately shares no code with the Jacobi-polynomial
//! route in [`crate::states::wigner`]; each is the oracle for the other.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::basis::ManyBodySpace;
use crate::combin::binomial_exact;
use crate::error::Error;
use crate::halfint::HalfInt;
use crate::scalar::{EigenScalar, Real};
use crate::{Cplx, Result, State};

fn check_j(j: HalfInt) -> Result<usize> {
    if j < HalfInt::ZERO {
        return Err(Error::InvalidParameter(format!("j must be non-negative, got {j}")));
    }
    Ok((j + j).as_int().expect("2j is an integer") as usize + 1)
}

/// Ladder amplitude ⟨j,m+1|Ĵ⁺|j,m⟩ = √((j−m)(j+m+1)), Condon–Shortley phase.
fn ladder<T: Real>(j: HalfInt, m: HalfInt) -> T {
    let jm = T::of_i64(j.minus_as_int(m).expect("m on the j ladder"));
    let jp = T::of_i64(j.plus_as_int(m).expect("m on the j ladder") + 1);
    (jm * jp).sqrt()
}

/// Ĵ_z in the collective basis, m ascending along the diagonal.
pub fn collective_jz<T: Real>(j: HalfInt) -> Result<DMatrix<Cplx<T>>> {
    let dim = check_j(j)?;
    let mut out = DMatrix::zeros(dim, dim);
    for (i, m) in HalfInt::projection_range(j).into_iter().enumerate() {
        out[(i, i)] = Cplx::new(m.value::<T>(), T::zero());
    }
    Ok(out)
}

/// Ĵ_x = (Ĵ⁺ + Ĵ⁻)/2 in the collective basis.
pub fn collective_jx<T: Real>(j: HalfInt) -> Result<DMatrix<Cplx<T>>> {
    let dim = check_j(j)?;
    let ms = HalfInt::projection_range(j);
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim.saturating_sub(1) {
        let half_t = ladder::<T>(j, ms[i]) / T::of(2.0);
        out[(i + 1, i)] = Cplx::new(half_t, T::zero());
        out[(i, i + 1)] = Cplx::new(half_t, T::zero());
    }
    Ok(out)
}

/// Ĵ_y = (Ĵ⁺ − Ĵ⁻)/(2i) in the collective basis.
pub fn collective_jy<T: Real>(j: HalfInt) -> Result<DMatrix<Cplx<T>>> {
    let dim = check_j(j)?;
    let ms = HalfInt::projection_range(j);
    let mut out = DMatrix::zeros(dim, dim);
    for i in 0..dim.saturating_sub(1) {
        let half_t = ladder::<T>(j, ms[i]) / T::of(2.0);
        out[(i + 1, i)] = Cplx::new(T::zero(), -half_t);
        out[(i, i + 1)] = Cplx::new(T::zero(), half_t);
    }
    Ok(out)
}

/// exp(−iθĴ_y) via the eigendecomposition of Ĵ_y — the dense rotation oracle.
pub fn rotation_matrix<T: Real>(j: HalfInt, theta: T) -> Result<DMatrix<Cplx<T>>>
where
    Cplx<T>: EigenScalar<RealField = T>,
{
    let jy = collective_jy::<T>(j)?;
    let dim = jy.nrows();
    let eig = SymmetricEigen::new(jy);
    let mut out: DMatrix<Cplx<T>> = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let angle = theta * eig.eigenvalues[k];
        let phase = Cplx::new(angle.cos(), -angle.sin());
        let u = eig.eigenvectors.column(k);
        out.gerc(phase, &u, &u, Cplx::new(T::one(), T::zero()));
    }
    Ok(out)
}

/// A state in the collective |j,m⟩ basis, amplitudes ascending in m.
#[derive(Clone, Debug)]
pub struct DickeVector<T: Real> {
    j: HalfInt,
    amplitudes: DVector<Cplx<T>>,
}

impl<T: Real> DickeVector<T> {
    pub fn new(j: HalfInt, amplitudes: DVector<Cplx<T>>) -> Result<Self> {
        let dim = check_j(j)?;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amplitudes.len() });
        }
        let norm = amplitudes.norm();
        if (norm - T::one()).abs() > T::unit_norm_tol() {
            return Err(Error::Unnormalized {
                norm: norm.as_f64(),
                tol: T::unit_norm_tol().as_f64(),
            });
        }
        Ok(DickeVector { j, amplitudes })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn amplitudes(&self) -> &DVector<Cplx<T>> {
        &self.amplitudes
    }

    /// Position of |j,m⟩ in the amplitude vector, if m is on the ladder.
    pub fn index_of(&self, m: HalfInt) -> Option<usize> {
        (m.abs() <= self.j).then(|| (m + self.j).as_int())?.map(|i| i as usize)
    }
}

/// The Dicke state |j,m⟩ with j = N/2 in the full 2^N computational basis:
/// an equal positive superposition of every configuration with j+m up-spins.
pub fn dicke_state<T: Real>(n_sites: usize, m: HalfInt) -> Result<State<T>> {
    let space = ManyBodySpace::qubits(n_sites)?;
    let j = HalfInt::from_doubled(n_sites as i64);
    if m.abs() > j || !(j - m).is_integer() {
        return Err(Error::InvalidParameter(format!(
            "m = {m} is not a projection of j = {j}"
        )));
    }
    let n_up = j.plus_as_int(m).unwrap() as usize;
    let count = binomial_exact(n_sites as u64, n_up as u64);
    let amp = Cplx::new(T::one() / T::of(count as f64).sqrt(), T::zero());
    let mut state = State::zeros(space.dim());
    for index in 0..space.dim() {
        if index.count_ones() as usize == n_up {
            state[index] = amp;
        }
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{collective, spin};

    fn h(doubled: i64) -> HalfInt {
        HalfInt::from_doubled(doubled)
    }

    #[test]
    fn stretched_state_is_all_up() {
        let s = dicke_state::<f64>(4, h(4)).unwrap();
        assert_eq!(s[15], Cplx::new(1.0, 0.0));
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn three_site_w_like_state_has_three_equal_amplitudes() {
        // N = 3, m = 1/2: two up-spins, C(3,2) = 3 configurations.
        let s = dicke_state::<f64>(3, h(1)).unwrap();
        let amp = 1.0 / 3.0f64.sqrt();
        for index in [3usize, 5, 6] {
            assert!((s[index].re - amp).abs() < 1e-15, "index {index}");
        }
        assert_eq!(s[7], Cplx::new(0.0, 0.0));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dicke_states_are_collective_eigenvectors() {
        // Apply the assembled full-space operators: Ĵ_z|j,m⟩ = m|j,m⟩ and
        // (Ĵ_x²+Ĵ_y²+Ĵ_z²)|j,m⟩ = j(j+1)|j,m⟩ for N = 6, j = 3, m = 1.
        let n = 6;
        let psi = dicke_state::<f64>(n, h(2)).unwrap();
        let jx = collective(n, spin::sx::<f64>()).unwrap();
        let jy = collective(n, spin::sy::<f64>()).unwrap();
        let jz = collective(n, spin::sz::<f64>()).unwrap();

        let z_psi = jz.apply(&psi).unwrap();
        assert!((&z_psi - &psi).norm() < 1e-12, "m = 1 eigenvector of Ĵ_z");

        let mut jsq = State::<f64>::zeros(psi.len());
        for op in [&jx, &jy, &jz] {
            jsq += op.apply(&op.apply(&psi).unwrap()).unwrap();
        }
        let target = &psi * Cplx::new(12.0, 0.0); // j(j+1) = 3·4
        assert!((&jsq - &target).norm() < 1e-12, "Ĵ² eigenvalue defect");
    }

    #[test]
    fn invalid_projections_are_rejected() {
        assert!(dicke_state::<f64>(4, h(6)).is_err(), "|m| > j");
        assert!(dicke_state::<f64>(4, h(1)).is_err(), "half-odd m for integer j");
    }

    #[test]
    fn collective_operators_satisfy_the_algebra() {
        // [Ĵ_x, Ĵ_y] = iĴ_z on the j = 3/2 ladder.
        let j = h(3);
        let jx = collective_jx::<f64>(j).unwrap();
        let jy = collective_jy::<f64>(j).unwrap();
        let jz = collective_jz::<f64>(j).unwrap();
        let comm = &jx * &jy - &jy * &jx;
        let target = jz.map(|z| z * Cplx::new(0.0, 1.0));
        assert!((&comm - &target).norm() < 1e-14);
    }

    #[test]
    fn spin_half_rotation_is_the_textbook_block() {
        let theta = 0.67f64;
        let r = rotation_matrix::<f64>(h(1), theta).unwrap();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        // Basis ascending in m: rows/columns are (−1/2, +1/2).
        let expect = [[c, s], [-s, c]];
        for row in 0..2 {
            for col in 0..2 {
                let z = r[(row, col)];
                assert!(
                    (z.re - expect[row][col]).abs() < 1e-12 && z.im.abs() < 1e-12,
                    "entry ({row},{col}) = {z:?}, want {}",
                    expect[row][col]
                );
            }
        }
    }

    #[test]
    fn rotations_are_unitary() {
        let r = rotation_matrix::<f64>(h(7), 1.234).unwrap(); // j = 7/2
        let gram = r.adjoint() * &r;
        let defect = (&gram - DMatrix::identity(8, 8)).norm();
        assert!(defect < 1e-12, "R†R − I defect {defect:.3e}");
    }
}

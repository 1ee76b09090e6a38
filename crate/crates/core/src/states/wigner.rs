//! Wigner small-d rotation elements d^j_{m′m}(θ) = ⟨j,m′|e^{−iθĴ_y}|j,m⟩,
//! evaluated through Jacobi polynomials with log-domain factorials.
//!
//! The textbook closed form is only directly usable where its Jacobi
//! parameters are non-negative (m ≥ |m′|); the other three index quadrants
//! are reached through the exact symmetries d_{m′m} = (−1)^{m′−m} d_{mm′}
//! and d_{m′m} = d_{−m,−m′}. That keeps a single numerically tame kernel
//! instead of four sign-fragile formula variants.

use nalgebra::DMatrix;

use crate::combin::LnFactorials;
use crate::error::Error;
use crate::halfint::HalfInt;
use crate::scalar::Real;
use crate::Result;

/// Jacobi polynomial P_n^{(a,b)}(x) by the standard three-term recurrence.
/// Stable for the a, b ≥ 0 arguments rotation elements need.
pub fn jacobi_polynomial<T: Real>(n: usize, a: T, b: T, x: T) -> Result<T> {
    let one = T::one();
    let two = T::of(2.0);
    if a <= -one || b <= -one {
        return Err(Error::InvalidParameter(format!(
            "Jacobi parameters must exceed -1, got a = {}, b = {}",
            a.as_f64(),
            b.as_f64()
        )));
    }
    if x.abs() > one + T::merge_tol() {
        return Err(Error::InvalidParameter(format!(
            "Jacobi argument must lie in [-1, 1], got {}",
            x.as_f64()
        )));
    }
    let x = x.clamp(-one, one);
    let mut prev = one;
    if n == 0 {
        return Ok(prev);
    }
    let mut curr = (a + one) + (a + b + two) * (x - one) / two;
    for k in 1..n {
        let kk = T::of_usize(k);
        let s = two * kk + a + b;
        let c1 = two * (kk + one) * (kk + a + b + one) * s;
        let c2 = (s + one) * ((s + two) * s * x + a * a - b * b);
        let c3 = two * (kk + a) * (kk + b) * (s + two);
        let next = (c2 * curr - c3 * prev) / c1;
        prev = curr;
        curr = next;
    }
    Ok(curr)
}

fn check_projection(j: HalfInt, label: &str, m: HalfInt) -> Result<()> {
    if m.abs() > j || !(j - m).is_integer() {
        return Err(Error::InvalidParameter(format!(
            "rotation index {label} = {m} is not a projection of j = {j}"
        )));
    }
    Ok(())
}

/// The closed form, valid only for col ≥ |row| where both Jacobi parameters
/// are non-negative.
fn direct<T: Real>(
    facts: &LnFactorials<T>,
    j: HalfInt,
    row: HalfInt,
    col: HalfInt,
    theta: T,
) -> T {
    let a = col.minus_as_int(row).expect("index classes checked by caller");
    let b = col.plus_as_int(row).expect("index classes checked by caller");
    debug_assert!(a >= 0 && b >= 0, "direct form needs col ≥ |row|");
    let n = j.minus_as_int(col).expect("index classes checked by caller") as usize;
    let jp_col = j.plus_as_int(col).unwrap() as usize;
    let jp_row = j.plus_as_int(row).unwrap() as usize;
    let jm_row = j.minus_as_int(row).unwrap() as usize;
    let half = T::of(0.5);
    let ln_pref = (facts.ln_factorial(jp_col) + facts.ln_factorial(n)
        - facts.ln_factorial(jp_row)
        - facts.ln_factorial(jm_row))
        * half;
    let p = jacobi_polynomial(n, T::of_i64(a), T::of_i64(b), theta.cos())
        .expect("cosine stays in the Jacobi domain");
    let ht = theta * half;
    ln_pref.exp() * p * ht.sin().powi(a as i32) * ht.cos().powi(b as i32)
}

fn parity_sign<T: Real>(row: HalfInt, col: HalfInt) -> T {
    let k = row.minus_as_int(col).expect("index classes checked by caller");
    if k.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Dispatch to whichever of the four symmetry images puts the element in the
/// direct form's quadrant. Exactly one branch applies for every valid pair.
fn element<T: Real>(
    facts: &LnFactorials<T>,
    j: HalfInt,
    row: HalfInt,
    col: HalfInt,
    theta: T,
) -> T {
    if col >= row.abs() {
        direct(facts, j, row, col, theta)
    } else if row >= col.abs() {
        parity_sign::<T>(row, col) * direct(facts, j, col, row, theta)
    } else if -row >= col.abs() {
        direct(facts, j, -col, -row, theta)
    } else {
        parity_sign::<T>(row, col) * direct(facts, j, -row, -col, theta)
    }
}

fn factorial_table<T: Real>(j: HalfInt) -> LnFactorials<T> {
    let two_j = (j + j).as_int().expect("2j is always an integer") as usize;
    LnFactorials::up_to(two_j)
}

/// Single rotation element d^j_{m′m}(θ) with `m_row` = m′ and `m_col` = m.
pub fn wigner_d<T: Real>(j: HalfInt, m_row: HalfInt, m_col: HalfInt, theta: T) -> Result<T> {
    if j < HalfInt::ZERO {
        return Err(Error::InvalidParameter(format!("j must be non-negative, got {j}")));
    }
    check_projection(j, "m'", m_row)?;
    check_projection(j, "m", m_col)?;
    let facts = factorial_table::<T>(j);
    Ok(element(&facts, j, m_row, m_col, theta))
}

/// One row of the rotation matrix: d^j_{m′m}(θ) over all m, ascending.
pub fn wigner_d_row<T: Real>(j: HalfInt, m_row: HalfInt, theta: T) -> Result<Vec<T>> {
    if j < HalfInt::ZERO {
        return Err(Error::InvalidParameter(format!("j must be non-negative, got {j}")));
    }
    check_projection(j, "m'", m_row)?;
    let facts = factorial_table::<T>(j);
    Ok(HalfInt::projection_range(j)
        .into_iter()
        .map(|m| element(&facts, j, m_row, m, theta))
        .collect())
}

/// The full (2j+1)×(2j+1) rotation matrix, rows m′ and columns m ascending.
pub fn wigner_d_matrix<T: Real>(j: HalfInt, theta: T) -> Result<DMatrix<T>> {
    if j < HalfInt::ZERO {
        return Err(Error::InvalidParameter(format!("j must be non-negative, got {j}")));
    }
    let ms = HalfInt::projection_range(j);
    let facts = factorial_table::<T>(j);
    let dim = ms.len();
    let mut out = DMatrix::zeros(dim, dim);
    for (r, &mr) in ms.iter().enumerate() {
        for (c, &mc) in ms.iter().enumerate() {
            out[(r, c)] = element(&facts, j, mr, mc, theta);
        }
    }
    Ok(out)
}

/// Leading large-j behaviour of the quarter-turn overlap:
/// ⟨j,m′|j,m⟩_x ∼ √(2/πj) · cos((j − m + m′)π/2). Only meaningful for
/// m, m′ fixed while j grows; used to cross-check the exact elements.
pub fn asymptotic_overlap<T: Real>(j: HalfInt, m_row: HalfInt, m_col: HalfInt) -> T {
    let pi = T::of(std::f64::consts::PI);
    let phase = (j - m_col + m_row).value::<T>() * pi / T::of(2.0);
    (T::of(2.0) / (pi * j.value::<T>())).sqrt() * phase.cos()
}

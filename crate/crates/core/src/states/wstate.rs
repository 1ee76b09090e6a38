//! The W-family distribution: measurement statistics of |j, j−1⟩ in the
//! x-rotated collective basis.
//!
//! Everything reduces to the overlap magnitudes |c_m| = 2^{−j}√C(2j, j+m) of
//! the stretched state with the rotated basis, and from them
//! p_m = 2m²·|c_m|²/j. Both are evaluated in the log domain so j in the
//! hundreds stays finite; exact integer identities and the dense rotation
//! oracle pin the values in the tests.

use crate::combin::LnFactorials;
use crate::error::Error;
use crate::halfint::HalfInt;
use crate::scalar::Real;
use crate::Result;

fn check_j(j: HalfInt) -> Result<()> {
    if j < HalfInt::HALF {
        return Err(Error::InvalidParameter(format!("need j ≥ 1/2, got {j}")));
    }
    Ok(())
}

/// Overlap magnitudes |c_m| = |⟨j,j| e^{−i(π/2)Ĵ_y} |j,m⟩| = 2^{−j}√C(2j, j+m),
/// returned ascending in m.
pub fn w_state_overlap_magnitudes<T: Real>(j: HalfInt) -> Result<Vec<(HalfInt, T)>> {
    check_j(j)?;
    let two_j = (j + j).as_int().unwrap() as usize;
    let facts = LnFactorials::<T>::up_to(two_j);
    let ln2 = T::of(std::f64::consts::LN_2);
    let half = T::of(0.5);
    Ok(HalfInt::projection_range(j)
        .into_iter()
        .map(|m| {
            let jp = j.plus_as_int(m).unwrap() as usize;
            let ln_c = facts.ln_binomial(two_j, jp) * half - j.value::<T>() * ln2;
            (m, ln_c.exp())
        })
        .collect())
}

/// The distribution p_m = 2m²/(2^{2j} j) · C(2j, j+m) of the collective
/// observable for the state |j, j−1⟩ measured in the rotated basis,
/// ascending in m. Sums to one by construction of the overlaps.
pub fn w_state_distribution<T: Real>(j: HalfInt) -> Result<Vec<(HalfInt, T)>> {
    check_j(j)?;
    let two = T::of(2.0);
    let inv_j = T::one() / j.value::<T>();
    Ok(w_state_overlap_magnitudes::<T>(j)?
        .into_iter()
        .map(|(m, c)| {
            let mv = m.value::<T>();
            (m, two * mv * mv * inv_j * c * c)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::compensated_sum;
    use crate::states::dicke::rotation_matrix;

    fn h(doubled: i64) -> HalfInt {
        HalfInt::from_doubled(doubled)
    }

    #[test]
    fn j_equal_one_is_the_half_half_split() {
        let p = w_state_distribution::<f64>(h(2)).unwrap();
        let values: Vec<f64> = p.iter().map(|&(_, v)| v).collect();
        assert!((values[0] - 0.5).abs() < 1e-14, "p_{{-1}} = {}", values[0]);
        assert_eq!(values[1], 0.0, "the m² weight kills p₀ exactly");
        assert!((values[2] - 0.5).abs() < 1e-14, "p_{{+1}} = {}", values[2]);
    }

    #[test]
    fn stretched_overlap_is_two_to_minus_j() {
        for dj in [1i64, 2, 5, 12] {
            let j = h(dj);
            let cs = w_state_overlap_magnitudes::<f64>(j).unwrap();
            let (m, cj) = *cs.last().unwrap();
            assert_eq!(m, j);
            let expect = 0.5f64.powf(dj as f64 / 2.0);
            assert!(
                (cj - expect).abs() < 1e-14 * expect,
                "|c_j| for j = {j}: {cj} vs {expect}"
            );
        }
    }

    #[test]
    fn overlaps_normalize_and_distribution_sums_to_one() {
        for dj in [3i64, 8, 25, 240] {
            let j = h(dj);
            let c2 = compensated_sum(
                w_state_overlap_magnitudes::<f64>(j).unwrap().iter().map(|&(_, c)| c * c),
            );
            assert!((c2 - 1.0).abs() < 1e-10, "Σ|c_m|² = {c2} for j = {j}");
            let total = compensated_sum(
                w_state_distribution::<f64>(j).unwrap().iter().map(|&(_, p)| p),
            );
            assert!((total - 1.0).abs() < 1e-10, "Σp_m = {total} for j = {j}");
        }
    }

    #[test]
    fn signed_coefficients_satisfy_both_ladder_relations() {
        // With the (−1)^{j−m} phase restored, the overlaps obey
        //   2m·c_m  =  t₊ c_{m+1} − t₋ c_{m−1}
        //   2j·c_m  = −t₊ c_{m+1} − t₋ c_{m−1}
        // where t₊ = √((j−m)(j+m+1)) and t₋ = √((j+m)(j−m+1)).
        for dj in [1i64, 4, 9, 27] {
            let j = h(dj);
            let mags = w_state_overlap_magnitudes::<f64>(j).unwrap();
            let signed: Vec<f64> = mags
                .iter()
                .map(|&(m, c)| {
                    let k = j.minus_as_int(m).unwrap();
                    if k.rem_euclid(2) == 0 {
                        c
                    } else {
                        -c
                    }
                })
                .collect();
            let at = |i: i64| -> f64 {
                if i < 0 || i as usize >= signed.len() {
                    0.0
                } else {
                    signed[i as usize]
                }
            };
            for (i, &(m, _)) in mags.iter().enumerate() {
                let mv = m.value::<f64>();
                let jv = j.value::<f64>();
                let t_up = ((jv - mv) * (jv + mv + 1.0)).sqrt();
                let t_dn = ((jv + mv) * (jv - mv + 1.0)).sqrt();
                let up = at(i as i64 + 1);
                let dn = at(i as i64 - 1);
                let scale = 1.0 + (t_up * up).abs() + (t_dn * dn).abs();
                let r1 = 2.0 * mv * at(i as i64) - (t_up * up - t_dn * dn);
                let r2 = 2.0 * jv * at(i as i64) - (-t_up * up - t_dn * dn);
                assert!(r1.abs() <= 1e-10 * scale, "first relation at j={j}, m={m}: {r1:e}");
                assert!(r2.abs() <= 1e-10 * scale, "second relation at j={j}, m={m}: {r2:e}");
            }
        }
    }

    #[test]
    fn exact_integer_identity_holds() {
        // Σ_m (2m)²·C(2j, j+m) = 2j·2^{2j} is the integer form of Σp_m = 1;
        // checking it in u128 leaves no floating-point wiggle room at all.
        for dj in 1u64..=20 {
            let mut sum: u128 = 0;
            for dm in (-(dj as i64)..=dj as i64).step_by(2) {
                let k = ((dj as i64 + dm) / 2) as u64;
                sum += (dm * dm) as u128 * crate::combin::binomial_exact(dj, k);
            }
            assert_eq!(sum, dj as u128 * (1u128 << dj), "identity fails at 2j = {dj}");
        }
    }

    #[test]
    fn distribution_matches_the_rotation_oracle() {
        // p_m = |⟨j,j−1| e^{−i(π/2)Ĵ_y} |j,m⟩|², row j−1 of the dense matrix.
        for dj in 1i64..=24 {
            let j = h(dj);
            let r = rotation_matrix::<f64>(j, std::f64::consts::FRAC_PI_2).unwrap();
            let row = r.nrows() - 2; // m′ = j − 1
            let p = w_state_distribution::<f64>(j).unwrap();
            for (col, &(m, formula)) in p.iter().enumerate() {
                let oracle = r[(row, col)].norm_sqr();
                assert!(
                    (formula - oracle).abs() < 1e-10,
                    "j = {j}, m = {m}: formula {formula:.3e} vs oracle {oracle:.3e}"
                );
            }
        }
    }

    #[test]
    fn large_j_tail_matches_the_stirling_form() {
        // p₁ ≈ 2/(√π · j^{3/2}) for j = 100.
        let j = h(200);
        let p = w_state_distribution::<f64>(j).unwrap();
        let idx = p.iter().position(|&(m, _)| m == h(2)).unwrap();
        let asymptotic = 2.0 / (std::f64::consts::PI.sqrt() * 100.0f64.powf(1.5));
        let rel = (p[idx].1 - asymptotic).abs() / asymptotic;
        assert!(rel < 0.03, "p₁ off the asymptote by {:.2}%", 100.0 * rel);
    }

    #[test]
    fn distribution_and_overlaps_are_consistent() {
        // p_m = (m√(2/j))²·|c_m|² ties the two public functions together.
        let j = h(13); // j = 13/2
        let ps = w_state_distribution::<f64>(j).unwrap();
        let cs = w_state_overlap_magnitudes::<f64>(j).unwrap();
        for (&(m, p), &(m2, c)) in ps.iter().zip(cs.iter()) {
            assert_eq!(m, m2);
            let mv = m.value::<f64>();
            let expect = 2.0 * mv * mv / j.value::<f64>() * c * c;
            assert!((p - expect).abs() <= 1e-15 + 1e-12 * expect, "m = {m}");
        }
    }

    #[test]
    fn sub_half_j_is_rejected() {
        assert!(w_state_distribution::<f64>(HalfInt::ZERO).is_err());
    }
}

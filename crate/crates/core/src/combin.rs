//! Combinatorics in two registers: exact integer results where they fit in a
//! u128 (small oracle computations, sector dimensions) and compensated
//! log-domain tables for the factorial ratios that appear at large sizes.

use num_integer::binomial;

use crate::scalar::Real;

/// Table of ln(n!) for n = 0..=n_max, accumulated with compensated summation
/// so entries stay accurate to a few ulps even for n in the millions.
pub struct LnFactorials<T> {
    table: Vec<T>,
}

impl<T: Real> LnFactorials<T> {
    pub fn up_to(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        let mut sum = T::zero();
        let mut comp = T::zero();
        table.push(T::zero());
        for n in 1..=n_max {
            // Neumaier step on ln(n); the terms grow, so the branch matters.
            let x = T::of_usize(n).ln();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        LnFactorials { table }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// ln(n!). Panics if the table was built too short — that is a programmer
    /// error, not a data error.
    pub fn ln_factorial(&self, n: usize) -> T {
        self.table[n]
    }

    /// ln C(n, k); returns negative infinity for k out of range so that
    /// exp(·) collapses to a clean zero term.
    pub fn ln_binomial(&self, n: usize, k: usize) -> T {
        if k > n {
            return T::of(f64::NEG_INFINITY);
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// Exact C(n, k) in u128. Panics on internal overflow via `num_integer`;
/// callers keep n small enough (n ≤ 128 always fits for the k we use).
pub fn binomial_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    binomial(n as u128, k as u128)
}

/// Exact multinomial coefficient N! / Π counts_l! where N = Σ counts_l,
/// computed as a product of binomials so intermediates stay bounded.
pub fn multinomial_exact(counts: &[usize]) -> u128 {
    let mut remaining: u64 = counts.iter().map(|&c| c as u64).sum();
    let mut result: u128 = 1;
    for &c in counts {
        result *= binomial_exact(remaining, c as u64);
        remaining -= c as u64;
    }
    result
}

/// All compositions of `total` into exactly `parts` non-negative integers,
/// in lexicographically decreasing order of the leading entries. The count
/// is C(total + parts - 1, parts - 1).
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut current = vec![0usize; parts];
    fill(&mut out, &mut current, 0, total);
    out
}

fn fill(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, slot: usize, remaining: usize) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for take in (0..=remaining).rev() {
        current[slot] = take;
        fill(out, current, slot + 1, remaining - take);
    }
}

/// All k-element subsets of {0, …, n-1}, each ascending, in lexicographic
/// order. The count is C(n, k).
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // Advance: find the rightmost slot that can still move up.
        let mut slot = k;
        loop {
            if slot == 0 {
                return out;
            }
            slot -= 1;
            if current[slot] < n - (k - slot) {
                break;
            }
        }
        current[slot] += 1;
        for later in slot + 1..k {
            current[later] = current[later - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_binomials_match_pascal() {
        for n in 0..=20u64 {
            for k in 0..=n {
                let lhs = binomial_exact(n, k);
                let rhs = if k == 0 || k == n {
                    1
                } else {
                    binomial_exact(n - 1, k - 1) + binomial_exact(n - 1, k)
                };
                assert_eq!(lhs, rhs, "Pascal identity fails at C({n},{k})");
            }
        }
        assert_eq!(binomial_exact(52, 5), 2_598_960);
    }

    #[test]
    fn log_binomial_agrees_with_exact_values() {
        let lf = LnFactorials::<f64>::up_to(64);
        for n in [5u64, 17, 30, 64] {
            for k in [0u64, 1, n / 3, n / 2, n] {
                let exact = binomial_exact(n, k) as f64;
                let vialn = lf.ln_binomial(n as usize, k as usize).exp();
                assert!(
                    (vialn - exact).abs() <= 1e-10 * exact,
                    "ln C({n},{k}) off: exp gives {vialn}, exact {exact}"
                );
            }
        }
    }

    #[test]
    fn log_factorial_stays_accurate_at_large_n() {
        // Stirling with the first two correction terms is good to ~1e-12
        // relative at n = 1e6; the table must sit on top of it.
        let n = 1_000_000usize;
        let lf = LnFactorials::<f64>::up_to(n);
        let x = n as f64;
        let stirling = x * x.ln() - x
            + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
            + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        let got = lf.ln_factorial(n);
        assert!(
            (got - stirling).abs() < 1e-8,
            "ln(10^6!) drifted: table {got:.10}, Stirling {stirling:.10}"
        );
    }

    #[test]
    fn multinomial_reduces_to_binomial_and_counts_anagrams() {
        assert_eq!(multinomial_exact(&[3, 5]), binomial_exact(8, 3));
        // "MISSISSIPPI": 11! / (1! 4! 4! 2!)
        assert_eq!(multinomial_exact(&[1, 4, 4, 2]), 34_650);
        assert_eq!(multinomial_exact(&[]), 1);
    }

    #[test]
    fn combinations_enumerate_all_subsets_in_order() {
        let subsets = combinations(5, 3);
        assert_eq!(subsets.len() as u128, binomial_exact(5, 3));
        assert_eq!(subsets.first(), Some(&vec![0, 1, 2]));
        assert_eq!(subsets.last(), Some(&vec![2, 3, 4]));
        assert!(subsets.windows(2).all(|w| w[0] < w[1]), "lexicographic order");
        assert!(subsets.iter().all(|s| s.windows(2).all(|w| w[0] < w[1])));
        assert_eq!(combinations(4, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(3, 4).is_empty());
    }

    #[test]
    fn compositions_enumerate_stars_and_bars_exactly() {
        let comps = compositions(4, 3);
        assert_eq!(comps.len() as u128, binomial_exact(4 + 3 - 1, 3 - 1));
        assert!(comps.iter().all(|c| c.iter().sum::<usize>() == 4));
        // No duplicates.
        let mut sorted = comps.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), comps.len(), "duplicate compositions emitted");
        // One part: the whole total.
        assert_eq!(compositions(7, 1), vec![vec![7]]);
    }
}

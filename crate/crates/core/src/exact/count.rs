//! Size of the feasible solution space for distinct unit-cost pallets.
//!
//! With `Q_m` pallets on shelf `m`, the placements number
//! `N! / prod_m Q_m!`; the total sums this over every occupancy tuple with
//! `Q_m <= R_m` and `sum Q_m = N`. The sum is evaluated shelf by shelf:
//!
//! ```text
//! f(m, n) = sum_{q = max(0, n - sum_{x>m} R_x)}^{min(R_m, n)} C(n, q) f(m + 1, n - q)
//! f(M, 0) = 1
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_integer::binomial;

use crate::{Error, Result};

/// Exact number of ways to place `items` distinct pallets on shelves with
/// the given capacities.
pub fn count_solutions_exact(capacities: &[u64], items: u64) -> BigUint {
    let n = items as usize;
    // suffix[m] = total capacity of shelves m.. (saturating)
    let mut suffix = vec![0u64; capacities.len() + 1];
    for m in (0..capacities.len()).rev() {
        suffix[m] = suffix[m + 1].saturating_add(capacities[m]);
    }
    // ways[k] = f(m, k) for the shelf currently being folded in
    let mut ways: Vec<BigUint> = vec![BigUint::from(0u32); n + 1];
    ways[0] = BigUint::from(1u32);
    for m in (0..capacities.len()).rev() {
        let mut next = vec![BigUint::from(0u32); n + 1];
        for (k, slot) in next.iter_mut().enumerate() {
            let k64 = k as u64;
            if k64 > suffix[m] {
                continue;
            }
            let low = k64.saturating_sub(suffix[m + 1]);
            let high = capacities[m].min(k64);
            let mut total = BigUint::from(0u32);
            for q in low..=high {
                let rest = &ways[k - q as usize];
                if rest.bits() == 0 {
                    continue;
                }
                total += binomial(BigUint::from(k64), BigUint::from(q)) * rest;
            }
            *slot = total;
        }
        ways = next;
    }
    ways.swap_remove(n)
}

/// Near-equal occupancy: `floor(N/M)` per shelf and one more on the first
/// `N mod M` shelves.
pub fn balanced_occupancy(shelves: usize, items: u64) -> Vec<u64> {
    if shelves == 0 {
        return Vec::new();
    }
    let base = items / shelves as u64;
    let extra = (items % shelves as u64) as usize;
    (0..shelves).map(|m| base + u64::from(m < extra)).collect()
}

/// The single multinomial term of the balanced occupancy, in log10.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub log10: f64,
    pub exponent: i64,
}

/// `log10(N! / prod_m Q_m!)` for the balanced occupancy `Q`, a lower bound on
/// the number of feasible placements.
pub fn count_lower_bound_log10(capacities: &[u64], items: u64) -> Result<LowerBound> {
    let occupancy = balanced_occupancy(capacities.len(), items);
    if capacities.is_empty() && items > 0 {
        return Err(Error::InvalidArgument(format!("cannot place {items} items on zero shelves")));
    }
    if let Some((m, (&q, &r))) = occupancy.iter().zip(capacities).enumerate().find(|(_, (q, r))| q > r) {
        return Err(Error::InvalidArgument(format!(
            "balanced occupancy needs {q} places on shelf {m}, which has capacity {r}"
        )));
    }
    let ln = log_factorial(items) - occupancy.iter().map(|&q| log_factorial(q)).sum::<f64>();
    let log10 = ln / core::f64::consts::LN_10;
    Ok(LowerBound {
        log10,
        exponent: libm::floor(log10) as i64,
    })
}

fn log_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// Exact count (when requested) alongside the balanced lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub exact: Option<BigUint>,
    /// Absent when the balanced occupancy does not fit the capacities.
    pub lower_bound: Option<LowerBound>,
    pub balanced_occupancy: Vec<u64>,
}

pub fn count_solutions(capacities: &[u64], items: u64, exact: bool) -> CountResult {
    CountResult {
        exact: exact.then(|| count_solutions_exact(capacities, items)),
        lower_bound: count_lower_bound_log10(capacities, items).ok(),
        balanced_occupancy: balanced_occupancy(capacities.len(), items),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
    }

    /// Literal sum over occupancy tuples of N! / prod Q_m!.
    fn tuple_sum(capacities: &[u64], items: u64) -> BigUint {
        fn rec(caps: &[u64], left: u64, denom: BigUint, n_fact: &BigUint, out: &mut BigUint) {
            match caps.split_first() {
                None => {
                    if left == 0 {
                        *out += n_fact / denom;
                    }
                }
                Some((&r, rest)) => {
                    for q in 0..=r.min(left) {
                        rec(rest, left - q, &denom * factorial(q), n_fact, out);
                    }
                }
            }
        }
        let mut out = BigUint::from(0u32);
        rec(capacities, items, BigUint::from(1u32), &factorial(items), &mut out);
        out
    }

    #[test]
    fn examples() {
        assert_eq!(count_solutions_exact(&[2, 2], 3), BigUint::from(6u32));
        assert_eq!(count_solutions_exact(&[4, 4, 4], 2), BigUint::from(9u32));
        assert_eq!(count_solutions_exact(&[0, 3], 0), BigUint::from(1u32));
        assert_eq!(count_solutions_exact(&[], 0), BigUint::from(1u32));
        assert_eq!(count_solutions_exact(&[], 2), BigUint::from(0u32));
        assert_eq!(count_solutions_exact(&[1, 1, 1], 4), BigUint::from(0u32));
    }

    #[test]
    fn dp_equals_literal_tuple_sum() {
        for caps in [vec![2, 2], vec![3, 0, 2], vec![1, 1, 1, 1], vec![5, 2, 3], vec![4]] {
            for n in 0..=8 {
                assert_eq!(count_solutions_exact(&caps, n), tuple_sum(&caps, n), "{caps:?}, N = {n}");
            }
        }
    }

    #[test]
    fn lower_bound_examples() {
        let lb = count_lower_bound_log10(&[8; 10], 10).unwrap();
        assert_eq!(lb.exponent, 6);
        assert!((lb.log10 - libm::log10(3_628_800.0)).abs() < 1e-9);
        let lb = count_lower_bound_log10(&[20; 25], 125).unwrap();
        assert_eq!(lb.exponent, 157);
        assert!(count_lower_bound_log10(&[1, 1], 3).is_err());
        assert!(count_lower_bound_log10(&[], 1).is_err());
        assert_eq!(count_lower_bound_log10(&[], 0).unwrap().log10, 0.0);
    }

    #[test]
    fn balanced_tuple() {
        assert_eq!(balanced_occupancy(4, 10), vec![3, 3, 2, 2]);
        assert_eq!(balanced_occupancy(3, 0), vec![0, 0, 0]);
        assert!(balanced_occupancy(0, 0).is_empty());
    }

    #[test]
    fn large_exact_count_is_consistent_with_bound() {
        let exact = count_solutions_exact(&[8; 10], 60);
        let lb = count_lower_bound_log10(&[8; 10], 60).unwrap();
        let digits = exact.to_str_radix(10).len() as i64;
        assert!(digits > lb.exponent);
    }

    #[test]
    fn count_result_bundles_both() {
        let r = count_solutions(&[2, 2], 3, true);
        assert_eq!(r.exact, Some(BigUint::from(6u32)));
        assert_eq!(r.balanced_occupancy, vec![2, 1]);
        assert!(r.lower_bound.is_some());
        assert!(count_solutions(&[1, 1], 3, false).lower_bound.is_none());
    }
}

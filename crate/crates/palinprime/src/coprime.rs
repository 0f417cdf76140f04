//! Ordered relatively prime pairs of palindromes.
//!
//! The count is over ordered pairs (m, n) with both coordinates ranging
//! independently over the value set; the diagonal pair (v, v) contributes
//! exactly when v = 1. Two independent routes are kept: a brute-force gcd
//! scan of the full pair matrix, and the Möbius sieve
//! sum over squarefree d of mu(d) * #Pi(length; 0, d)^2 evaluated on the
//! realized divisors of a [`DivisorProfile`]. They must agree exactly.

use rayon::prelude::*;

use crate::arith::{gcd_u64, nth_root_floor, thm1_constant, thm2_constant};
use crate::census::{divisor_counts, divisor_profile, pstar_list, DivisorCounts, DivisorProfile};
use crate::digits::Base;
use crate::{Error, Natural, Result};

/// Default cap on the number of (m, n) pairs the brute-force counter may
/// visit.
pub const DEFAULT_PAIR_BUDGET: u64 = 1_000_000_000;

/// Outcome of a Möbius-sieve pair count, split at the threshold U into the
/// head n1 (d <= U) and tail n2 (d > U).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveResult {
    /// The full signed sieve sum; equals the coprime pair count.
    pub total: i128,
    /// Contribution of divisors d <= threshold.
    pub n1: i128,
    /// Contribution of divisors d > threshold.
    pub n2: i128,
    /// The split point U.
    pub threshold: Natural,
    /// Squared cardinality of the value set.
    pub pair_universe: Natural,
}

/// Count ordered pairs (m, n) from `values` with gcd(m, n) = 1 by scanning
/// the full pair matrix, in parallel over row blocks.
pub fn coprime_pairs_brute(values: &[Natural], pair_budget: u64) -> Result<Natural> {
    let n = values.len();
    let pairs = (n as u128) * (n as u128);
    if pairs > pair_budget as u128 {
        return Err(Error::PairBudgetExceeded {
            values: n,
            budget: pair_budget,
        });
    }
    if values.iter().all(|&v| v <= u64::MAX as u128) {
        let small: Vec<u64> = values.iter().map(|&v| v as u64).collect();
        let count: u64 = small
            .par_iter()
            .map(|&m| small.iter().filter(|&&n| gcd_u64(m, n) == 1).count() as u64)
            .sum();
        Ok(count as u128)
    } else {
        let count: u128 = values
            .par_iter()
            .map(|&m| {
                values
                    .iter()
                    .filter(|&&n| crate::arith::gcd(m, n) == 1)
                    .count() as u128
            })
            .sum();
        Ok(count)
    }
}

/// The sieve sum over the realized divisors of a set of divisor counts.
fn sieve_counts(counts: &DivisorCounts, threshold: Natural, set_size: u64) -> Result<SieveResult> {
    let mut n1: i128 = 0;
    let mut n2: i128 = 0;
    for (&d, entry) in counts {
        let c = entry.count as i128;
        let signed = if entry.omega % 2 == 0 {
            c * c
        } else {
            -(c * c)
        };
        let acc = if d as u128 <= threshold {
            &mut n1
        } else {
            &mut n2
        };
        *acc = acc
            .checked_add(signed)
            .ok_or(Error::Overflow("sieve accumulator"))?;
    }
    let total = n1
        .checked_add(n2)
        .ok_or(Error::Overflow("sieve accumulator"))?;
    let universe = (set_size as u128) * (set_size as u128);
    debug_assert!(total >= 0 && total as u128 <= universe);
    Ok(SieveResult {
        total,
        n1,
        n2,
        threshold,
        pair_universe: universe,
    })
}

/// Möbius-sieve pair count over an existing divisor profile.
pub fn sieve_from_profile(profile: &DivisorProfile, threshold: Natural) -> Result<SieveResult> {
    let counts: DivisorCounts = profile.entries().collect();
    sieve_counts(&counts, threshold, profile.total())
}

/// Count ordered coprime pairs of palindromes of one odd length via the
/// Möbius sieve. Agrees exactly with [`coprime_pairs_brute`] on the same
/// value set.
pub fn coprime_pairs_sieve(
    length: u32,
    g: Base,
    threshold: Natural,
    budget: u64,
) -> Result<SieveResult> {
    let profile = divisor_profile(length, g, budget)?;
    sieve_from_profile(&profile, threshold)
}

/// Coprime pair count over the set of palindromes up to x coprime to
/// g^3 - g. The sieve runs over divisors coprime to g^3 - g, which is
/// automatic for realized divisors of that set.
pub fn pstar_coprime_pairs(
    x: Natural,
    g: Base,
    threshold: Natural,
    budget: u64,
) -> Result<SieveResult> {
    let values = pstar_list(x, g, budget)?;
    let counts = divisor_counts(values.iter().copied())?;
    debug_assert!(counts
        .keys()
        .all(|&d| crate::arith::gcd(d as u128, g.g3_minus_g() as u128) == 1));
    sieve_counts(&counts, threshold, values.len() as u64)
}

/// Default split point for a fixed length 2N+1: floor(g^(N/5)).
pub fn default_threshold_fixed(g: Base, half_length: u32) -> Result<Natural> {
    let power = (g.get() as u128)
        .checked_pow(half_length)
        .ok_or(Error::Overflow("threshold"))?;
    Ok(nth_root_floor(power, 5))
}

/// Default split point for the value-bounded census: floor(x^(1/10)).
pub fn default_threshold_pstar(x: Natural) -> Natural {
    nth_root_floor(x, 10)
}

/// Which census the convergence report runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// Palindromes of fixed odd length 2N+1; scales are half-lengths N.
    FixedLength,
    /// Palindromes up to x coprime to g^3 - g; scales are bounds x.
    PStar,
}

/// One row of a convergence report: the observed pair density against the
/// predicted leading constant.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub scale: Natural,
    pub count: i128,
    pub universe: Natural,
    pub ratio: f64,
    pub predicted: f64,
    pub relative_deviation: f64,
}

/// Evaluate the coprime pair density at each scale and compare it with the
/// predicted constant.
pub fn convergence_report(
    g: Base,
    scales: &[Natural],
    mode: ConvergenceMode,
    budget: u64,
) -> Result<Vec<ConvergenceRow>> {
    let predicted = match mode {
        ConvergenceMode::FixedLength => thm1_constant(g),
        ConvergenceMode::PStar => thm2_constant(g),
    };
    scales
        .iter()
        .map(|&scale| {
            let result = match mode {
                ConvergenceMode::FixedLength => {
                    let n = u32::try_from(scale).map_err(|_| Error::Overflow("half-length"))?;
                    let u = default_threshold_fixed(g, n)?;
                    coprime_pairs_sieve(2 * n + 1, g, u, budget)?
                }
                ConvergenceMode::PStar => {
                    let u = default_threshold_pstar(scale);
                    pstar_coprime_pairs(scale, g, u, budget)?
                }
            };
            let ratio = result.total as f64 / result.pair_universe as f64;
            Ok(ConvergenceRow {
                scale,
                count: result.total,
                universe: result.pair_universe,
                ratio,
                predicted,
                relative_deviation: (ratio - predicted).abs() / predicted,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::DEFAULT_ENUM_BUDGET as BUDGET;
    use crate::digits::Palindromes;

    fn base(g: u64) -> Base {
        Base::new(g).unwrap()
    }

    /// Same full-matrix count iterated in transposed order.
    fn brute_transposed(values: &[Natural]) -> Natural {
        let mut count: u128 = 0;
        for &n in values {
            for &m in values {
                if crate::arith::gcd(m, n) == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn brute_examples() {
        assert_eq!(
            coprime_pairs_brute(&[5, 7], DEFAULT_PAIR_BUDGET).unwrap(),
            2
        );
        assert_eq!(coprime_pairs_brute(&[1], DEFAULT_PAIR_BUDGET).unwrap(), 1);
        assert_eq!(
            coprime_pairs_brute(&[2, 4], DEFAULT_PAIR_BUDGET).unwrap(),
            0
        );
        assert!(matches!(
            coprime_pairs_brute(&[1, 2, 3, 4], 15),
            Err(Error::PairBudgetExceeded { .. })
        ));
    }

    #[test]
    fn brute_is_symmetric_in_iteration_order() {
        let values: Vec<Natural> = Palindromes::new(5, base(10)).unwrap().collect();
        let row_major = coprime_pairs_brute(&values, DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(row_major, brute_transposed(&values));
    }

    #[test]
    fn sieve_equals_brute_on_small_instances() {
        for &(length, gi) in &[
            (3u32, 2u64),
            (5, 2),
            (7, 2),
            (9, 2),
            (11, 2),
            (3, 3),
            (5, 3),
            (7, 3),
            (3, 10),
        ] {
            let g = base(gi);
            let values: Vec<Natural> = Palindromes::new(length, g).unwrap().collect();
            let brute = coprime_pairs_brute(&values, DEFAULT_PAIR_BUDGET).unwrap();
            let sieve = coprime_pairs_sieve(length, g, 10, BUDGET).unwrap();
            assert_eq!(sieve.total as u128, brute, "length {length} base {gi}");
            assert_eq!(
                sieve.pair_universe,
                (values.len() as u128) * (values.len() as u128)
            );
        }
    }

    #[test]
    fn sieve_example_base2() {
        let r = coprime_pairs_sieve(3, base(2), 1, BUDGET).unwrap();
        assert_eq!(r.total, 2);
        assert_eq!(r.pair_universe, 4);
    }

    #[test]
    fn mobius_partition_holds_for_every_threshold() {
        let g = base(10);
        for u in [1u128, 2, 3, 7, 11, 100, 1_000_000] {
            let r = coprime_pairs_sieve(3, g, u, BUDGET).unwrap();
            assert_eq!(r.n1 + r.n2, r.total, "U = {u}");
            assert_eq!(r.threshold, u);
        }
        // beyond every realized divisor the tail is empty
        let r = coprime_pairs_sieve(3, g, u128::MAX, BUDGET).unwrap();
        assert_eq!(r.n2, 0);
    }

    #[test]
    fn pstar_pairs_examples() {
        let g = base(10);
        // {1, 7}: the diagonal pair (7, 7) is not coprime
        let r = pstar_coprime_pairs(100, g, 1, BUDGET).unwrap();
        assert_eq!(r.total, 3);
        assert_eq!(r.pair_universe, 4);
        let brute = coprime_pairs_brute(&[1, 7], DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(r.total as u128, brute);

        let r = pstar_coprime_pairs(1, g, 1, BUDGET).unwrap();
        assert_eq!(r.total, 1);

        // {1, 5, 7} in base 2
        let r = pstar_coprime_pairs(10, base(2), 1, BUDGET).unwrap();
        let brute = coprime_pairs_brute(&[1, 5, 7], DEFAULT_PAIR_BUDGET).unwrap();
        assert_eq!(brute, 7);
        assert_eq!(r.total as u128, brute);
        assert_eq!(r.pair_universe, 9);
    }

    #[test]
    fn pstar_sieve_equals_brute_up_to_1e4() {
        for &gi in &[2u64, 10] {
            let g = base(gi);
            for &x in &[10u128, 100, 1_000, 10_000] {
                let values = pstar_list(x, g, BUDGET).unwrap();
                let brute = coprime_pairs_brute(&values, DEFAULT_PAIR_BUDGET).unwrap();
                let sieve = pstar_coprime_pairs(x, g, default_threshold_pstar(x), BUDGET).unwrap();
                assert_eq!(sieve.total as u128, brute, "x = {x} base {gi}");
                assert_eq!(sieve.n1 + sieve.n2, sieve.total);
            }
        }
    }

    #[test]
    fn default_thresholds() {
        // floor(2^(16/5)) = floor(9.18...) = 9
        assert_eq!(default_threshold_fixed(base(2), 16).unwrap(), 9);
        assert_eq!(default_threshold_fixed(base(10), 5).unwrap(), 10);
        assert_eq!(default_threshold_pstar(10_000_000), 5);
        assert_eq!(default_threshold_pstar(1), 1);
    }

    #[test]
    fn convergence_rows_examples() {
        let g = base(2);
        let rows = convergence_report(g, &[1], ConvergenceMode::FixedLength, BUDGET).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count, 2);
        assert_eq!(rows[0].universe, 4);
        assert!((rows[0].ratio - 0.5).abs() < 1e-15);
        assert!((rows[0].predicted - 0.810569).abs() < 1e-5);
        assert!(rows[0].relative_deviation >= 0.0);

        let rows =
            convergence_report(base(10), &[1], ConvergenceMode::FixedLength, BUDGET).unwrap();
        assert_eq!(rows[0].universe, 8100);
    }
}

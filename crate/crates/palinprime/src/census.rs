//! Exact counting of palindromes.
//!
//! Every exhaustive operation here is guarded by an enumeration budget
//! (number of palindromes walked) and fails with an explicit error instead
//! of running unbounded. Counting is data-parallel: the free-digit space
//! splits into g-1 shards by the leading free digit, shard results merge
//! in a fixed order, and results are therefore independent of thread count.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::arith::{factorize, gcd};
use crate::digits::{self, Base, Palindromes};
use crate::{Error, Natural, Result};

/// Default cap on the number of palindromes an exhaustive operation may
/// walk. The CLI lets `PALINPRIME_BUDGET` override it.
pub const DEFAULT_ENUM_BUDGET: u64 = 20_000_000;

/// An arithmetic-progression query: n = a (mod q), optionally restricted
/// to the refined class n = k (mod g^3 - g).
///
/// Residues are normalized into [0, q) and [0, g^3 - g) on entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApQuery {
    a: Natural,
    q: Natural,
    k: Option<u64>,
}

impl ApQuery {
    pub fn new(a: i128, q: Natural) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(ApQuery {
            a: normalize_residue(a, q),
            q,
            k: None,
        })
    }

    /// Restrict to the refined class k mod g^3 - g.
    pub fn with_class(mut self, k: i128, g: Base) -> Result<Self> {
        let m = g.g3_minus_g() as u128;
        self.k = Some(normalize_residue(k, m) as u64);
        Ok(self)
    }

    pub fn residue(&self) -> Natural {
        self.a
    }

    pub fn modulus(&self) -> Natural {
        self.q
    }

    pub fn class(&self) -> Option<u64> {
        self.k
    }
}

fn normalize_residue(a: i128, q: u128) -> u128 {
    if a >= 0 {
        a as u128 % q
    } else {
        let r = a.unsigned_abs() % q;
        if r == 0 {
            0
        } else {
            q - r
        }
    }
}

/// Closed-form palindrome count: g^(N-1)(g-1) for length 2N and
/// g^N (g-1) for length 2N+1.
pub fn count_formula(length: u32, g: Base) -> Result<Natural> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let b = g.get() as u128;
    let half = length / 2;
    let exp = if length.is_multiple_of(2) {
        half - 1
    } else {
        half
    };
    b.checked_pow(exp)
        .and_then(|p| p.checked_mul(b - 1))
        .ok_or(Error::Overflow("palindrome count"))
}

/// Split the rank space of one length into the g-1 shards determined by
/// the leading free digit, and map them in parallel with an ordered merge.
pub(crate) fn shard_map<T, F>(length: u32, g: Base, budget: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Palindromes) -> Result<T> + Sync,
{
    let count = count_formula(length, g)?;
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: count,
            budget,
        });
    }
    let shard_size = count / (g.get() as u128 - 1);
    let starts: Vec<u128> = (0..g.get() - 1).map(|r| r as u128 * shard_size).collect();
    starts
        .into_par_iter()
        .map(|start| f(Palindromes::range(length, g, start, start + shard_size)?))
        .collect()
}

/// Digit reversal of v in base g: the value of the reversed digit string.
/// v equals its reversal exactly when its digit string is palindromic.
fn reverse_value(v: Natural, g: Base) -> Natural {
    let b = g.get();
    if v <= u64::MAX as u128 {
        let mut m = v as u64;
        let mut rev: u128 = 0;
        while m > 0 {
            rev = rev * b as u128 + (m % b) as u128;
            m /= b;
        }
        rev
    } else {
        let b = b as u128;
        let mut m = v;
        let mut rev: u128 = 0;
        while m > 0 {
            rev = rev * b + m % b;
            m /= b;
        }
        rev
    }
}

/// Count palindromes of one length by enumerating the free-digit space and
/// verifying each constructed value with an independent numeric check:
/// the value must sit in [g^(length-1), g^length) and equal its own digit
/// reversal. Oracle for [`count_formula`].
pub fn count_enumerated(length: u32, g: Base, budget: u64) -> Result<Natural> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let b = g.get() as u128;
    let lo = b
        .checked_pow(length - 1)
        .ok_or(Error::Overflow("palindrome range"))?;
    let hi = lo.checked_mul(b);
    let shards = shard_map(length, g, budget, |walk| {
        let mut count: u128 = 0;
        for v in walk {
            let in_range = v >= lo && hi.is_none_or(|hi| v < hi);
            if in_range && reverse_value(v, g) == v {
                count += 1;
            }
        }
        Ok(count)
    })?;
    Ok(shards.into_iter().sum())
}

/// Exact number of palindromes of one length satisfying the query.
pub fn count_ap(length: u32, g: Base, query: &ApQuery, budget: u64) -> Result<Natural> {
    let q = query.modulus();
    let a = query.residue();
    let m = g.g3_minus_g();
    let fits64 = (g.get() as u128)
        .checked_pow(length)
        .is_some_and(|top| top <= u64::MAX as u128);
    let shards = if fits64 && q <= u64::MAX as u128 {
        let (q, a) = (q as u64, a as u64);
        shard_map(length, g, budget, |walk| {
            let mut count: u128 = 0;
            for v in walk {
                let v = v as u64;
                if v % q == a && query.k.is_none_or(|k| v % m == k) {
                    count += 1;
                }
            }
            Ok(count)
        })?
    } else {
        let m = m as u128;
        shard_map(length, g, budget, |walk| {
            let mut count: u128 = 0;
            for v in walk {
                if v % q == a && query.k.is_none_or(|k| v % m == k as u128) {
                    count += 1;
                }
            }
            Ok(count)
        })?
    };
    Ok(shards.into_iter().sum())
}

/// Counts for every residue class at once: entry a is the number of
/// palindromes of the length with n = a (mod q), optionally restricted to
/// the refined class k mod g^3 - g.
pub fn residue_spectrum(
    length: u32,
    g: Base,
    q: u64,
    k: Option<u64>,
    budget: u64,
) -> Result<Vec<Natural>> {
    if q == 0 {
        return Err(Error::ZeroModulus);
    }
    if q > 100_000_000 {
        return Err(Error::Overflow("residue spectrum size"));
    }
    let m = g.g3_minus_g();
    let fits64 = (g.get() as u128)
        .checked_pow(length)
        .is_some_and(|top| top <= u64::MAX as u128);
    let shards = shard_map(length, g, budget, |walk| {
        let mut counts = vec![0u64; q as usize];
        if fits64 {
            for v in walk {
                let v = v as u64;
                if k.is_none_or(|k| v % m == k) {
                    counts[(v % q) as usize] += 1;
                }
            }
        } else {
            for v in walk {
                if k.is_none_or(|k| v % m as u128 == k as u128) {
                    counts[(v % q as u128) as usize] += 1;
                }
            }
        }
        Ok(counts)
    })?;
    let mut totals = vec![0u128; q as usize];
    for shard in shards {
        for (t, c) in totals.iter_mut().zip(shard) {
            *t += c as u128;
        }
    }
    Ok(totals)
}

/// Count palindromes divisible by each given modulus, in one pass.
pub fn count_multiples(length: u32, g: Base, moduli: &[u64], budget: u64) -> Result<Vec<Natural>> {
    if moduli.contains(&0) {
        return Err(Error::ZeroModulus);
    }
    let fits64 = (g.get() as u128)
        .checked_pow(length)
        .is_some_and(|top| top <= u64::MAX as u128);
    let shards = shard_map(length, g, budget, |walk| {
        let mut counts = vec![0u128; moduli.len()];
        if fits64 {
            for v in walk {
                let v = v as u64;
                for (c, &d) in counts.iter_mut().zip(moduli) {
                    *c += u128::from(v.is_multiple_of(d));
                }
            }
        } else {
            for v in walk {
                for (c, &d) in counts.iter_mut().zip(moduli) {
                    *c += u128::from(v.is_multiple_of(d as u128));
                }
            }
        }
        Ok(counts)
    })?;
    let mut totals = vec![0u128; moduli.len()];
    for shard in shards {
        for (t, c) in totals.iter_mut().zip(shard) {
            *t += c;
        }
    }
    Ok(totals)
}

/// Exact main term for the count of odd-length palindromes divisible by a
/// divisor d of g^3 - g:
/// (1 + (d, g^2-1, 2)/(g-1)) * (1 - (d, g)/g) * #Pi(length)/d.
pub fn ap_main_term(length: u32, g: Base, d: u64) -> Result<BigRational> {
    if length.is_multiple_of(2) {
        return Err(Error::EvenLength(length));
    }
    let m = g.g3_minus_g();
    if d == 0 || !m.is_multiple_of(d) {
        return Err(Error::NotADivisor {
            divisor: d,
            modulus: m,
        });
    }
    let gi = g.get();
    let d2 = gcd(gcd(d as u128, (gi * gi - 1) as u128), 2) as i64;
    let dg = gcd(d as u128, gi as u128) as i64;
    let total = count_formula(length, g)?;
    let one = BigRational::from_integer(BigInt::from(1));
    let parity_factor = &one + BigRational::new(BigInt::from(d2), BigInt::from(gi as i64 - 1));
    let unit_factor = &one - BigRational::new(BigInt::from(dg), BigInt::from(gi as i64));
    let density = BigRational::new(BigInt::from(total), BigInt::from(d));
    Ok(parity_factor * unit_factor * density)
}

/// Explicit Brun-Titchmarsh-type majorant for #Pi(length; a, q):
/// 2g * g^(length/2) * q^(-1/2), plus 1 when a is nonzero mod q.
///
/// The constant 2g is traced from the proof: at most g^((N-r)/2)/d + 1
/// choices for the low block, at most d for the middle block, and
/// g^(-r/2) < g * q^(-1/2) from the choice of r.
pub fn bt_majorant(length: u32, g: Base, q: Natural, a_is_zero: bool) -> f64 {
    let gf = g.get() as f64;
    let kernel = 2.0 * gf * gf.powf(length as f64 / 2.0) / (q as f64).sqrt();
    kernel + if a_is_zero { 0.0 } else { 1.0 }
}

fn pstar_walk(x: Natural, g: Base, budget: u64, mut visit: impl FnMut(Natural)) -> Result<()> {
    if x == 0 {
        return Err(Error::ZeroValue);
    }
    let top_length = digits::to_digits(x, g)?.len() as u32;
    let m = g.g3_minus_g() as u128;
    let mut walked: u64 = 0;
    for length in 1..=top_length {
        for v in Palindromes::new(length, g)? {
            if v > x {
                break;
            }
            walked += 1;
            if walked > budget {
                return Err(Error::BudgetExceeded {
                    needed: walked as u128,
                    budget,
                });
            }
            if gcd(v, m) == 1 {
                visit(v);
            }
        }
    }
    Ok(())
}

/// All palindromes up to x that are coprime to g^3 - g, ascending.
pub fn pstar_list(x: Natural, g: Base, budget: u64) -> Result<Vec<Natural>> {
    let mut out = Vec::new();
    pstar_walk(x, g, budget, |v| out.push(v))?;
    Ok(out)
}

/// Cardinality of [`pstar_list`] without materializing it.
pub fn pstar_count(x: Natural, g: Base, budget: u64) -> Result<Natural> {
    let mut count: u128 = 0;
    pstar_walk(x, g, budget, |_| count += 1)?;
    Ok(count)
}

/// Count of palindromes divisible by one squarefree d, together with the
/// number of distinct primes of d (which determines mu(d)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorEntry {
    pub count: u64,
    pub omega: u8,
}

/// For each squarefree d dividing at least one palindrome of the length,
/// the exact count of palindromes it divides. Absent keys mean zero, which
/// collapses the formal sieve sum over all d below g^length to its
/// realized support.
#[derive(Debug, Clone)]
pub struct DivisorProfile {
    counts: BTreeMap<u64, DivisorEntry>,
    length: u32,
    base: Base,
}

impl DivisorProfile {
    /// #Pi(length; 0, d) for squarefree d; zero when d is not realized.
    pub fn count(&self, d: u64) -> u64 {
        self.counts.get(&d).map_or(0, |e| e.count)
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, DivisorEntry)> + '_ {
        self.counts.iter().map(|(&d, &e)| (d, e))
    }

    pub fn realized(&self) -> usize {
        self.counts.len()
    }

    /// Total palindrome count of the length, i.e. the d = 1 entry.
    pub fn total(&self) -> u64 {
        self.count(1)
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn base(&self) -> Base {
        self.base
    }
}

pub(crate) type DivisorCounts = BTreeMap<u64, DivisorEntry>;

/// Tally every squarefree divisor of every value's radical.
pub(crate) fn divisor_counts(values: impl Iterator<Item = Natural>) -> Result<DivisorCounts> {
    let mut counts = DivisorCounts::new();
    let mut subsets: Vec<(u64, u8)> = Vec::new();
    for v in values {
        let f = factorize(v)?;
        subsets.clear();
        subsets.push((1, 0));
        for p in f.distinct_primes() {
            for i in 0..subsets.len() {
                let (d, om) = subsets[i];
                subsets.push((d * p, om + 1));
            }
        }
        for &(d, om) in &subsets {
            counts
                .entry(d)
                .or_insert(DivisorEntry {
                    count: 0,
                    omega: om,
                })
                .count += 1;
        }
    }
    Ok(counts)
}

pub(crate) fn merge_divisor_counts(mut into: DivisorCounts, from: DivisorCounts) -> DivisorCounts {
    for (d, e) in from {
        into.entry(d)
            .or_insert(DivisorEntry {
                count: 0,
                omega: e.omega,
            })
            .count += e.count;
    }
    into
}

/// Build the divisor profile of one length by factoring every palindrome.
pub fn divisor_profile(length: u32, g: Base, budget: u64) -> Result<DivisorProfile> {
    let shards = shard_map(length, g, budget, divisor_counts)?;
    let counts = shards
        .into_iter()
        .fold(DivisorCounts::new(), merge_divisor_counts);
    Ok(DivisorProfile {
        counts,
        length,
        base: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = DEFAULT_ENUM_BUDGET;

    fn base(g: u64) -> Base {
        Base::new(g).unwrap()
    }

    #[test]
    fn count_formula_examples() {
        assert_eq!(count_formula(3, base(10)).unwrap(), 90);
        assert_eq!(count_formula(2, base(10)).unwrap(), 9);
        assert_eq!(count_formula(3, base(2)).unwrap(), 2);
        assert_eq!(count_formula(1, base(10)).unwrap(), 9);
        assert_eq!(count_formula(4, base(10)).unwrap(), 90);
        assert_eq!(count_formula(0, base(10)), Err(Error::ZeroLength));
    }

    #[test]
    fn count_enumerated_matches_formula() {
        for &(length, g) in &[
            (3u32, 10u64),
            (1, 10),
            (4, 10),
            (3, 2),
            (7, 2),
            (5, 3),
            (6, 5),
        ] {
            let g = base(g);
            assert_eq!(
                count_enumerated(length, g, BUDGET).unwrap(),
                count_formula(length, g).unwrap(),
                "length {length} base {g}"
            );
        }
    }

    #[test]
    fn formula_agrees_with_free_space_size() {
        for g in [2u64, 3, 5, 6, 10, 16] {
            let g = base(g);
            for length in 1..=20 {
                assert_eq!(
                    count_formula(length, g).unwrap(),
                    crate::digits::free_space_size(length, g).unwrap()
                );
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            count_enumerated(9, base(10), 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn count_ap_examples() {
        let g = base(10);
        let q = ApQuery::new(0, 2).unwrap();
        assert_eq!(count_ap(3, g, &q, BUDGET).unwrap(), 40);
        let q = ApQuery::new(0, 11).unwrap();
        assert_eq!(count_ap(3, g, &q, BUDGET).unwrap(), 8);
        let q = ApQuery::new(0, 9).unwrap();
        assert_eq!(count_ap(3, g, &q, BUDGET).unwrap(), 10);
    }

    #[test]
    fn count_ap_residues_partition() {
        let g = base(10);
        for q in [2u128, 3, 7, 11, 16] {
            let total: u128 = (0..q)
                .map(|a| count_ap(3, g, &ApQuery::new(a as i128, q).unwrap(), BUDGET).unwrap())
                .sum();
            assert_eq!(total, 90, "q = {q}");
        }
    }

    #[test]
    fn refined_classes_partition() {
        // summing the refined counts over k mod g^3 - g recovers the count
        let g = base(2);
        for length in [3u32, 5, 7] {
            let unrefined = count_ap(length, g, &ApQuery::new(1, 3).unwrap(), BUDGET).unwrap();
            let refined: u128 = (0..g.g3_minus_g())
                .map(|k| {
                    let q = ApQuery::new(1, 3)
                        .unwrap()
                        .with_class(k as i128, g)
                        .unwrap();
                    count_ap(length, g, &q, BUDGET).unwrap()
                })
                .sum();
            assert_eq!(refined, unrefined, "length {length}");
        }
    }

    #[test]
    fn residue_spectrum_matches_count_ap() {
        let g = base(10);
        let spectrum = residue_spectrum(3, g, 11, None, BUDGET).unwrap();
        assert_eq!(spectrum.iter().sum::<u128>(), 90);
        for a in 0..11u64 {
            let q = ApQuery::new(a as i128, 11).unwrap();
            assert_eq!(spectrum[a as usize], count_ap(3, g, &q, BUDGET).unwrap());
        }
        // refined class restriction
        let k = 101;
        let spectrum = residue_spectrum(3, g, 7, Some(k), BUDGET).unwrap();
        for a in 0..7u64 {
            let q = ApQuery::new(a as i128, 7)
                .unwrap()
                .with_class(k as i128, g)
                .unwrap();
            assert_eq!(spectrum[a as usize], count_ap(3, g, &q, BUDGET).unwrap());
        }
    }

    #[test]
    fn residue_normalization() {
        let q = ApQuery::new(-1, 7).unwrap();
        assert_eq!(q.residue(), 6);
        let q = ApQuery::new(-14, 7).unwrap();
        assert_eq!(q.residue(), 0);
        let q = ApQuery::new(15, 7).unwrap();
        assert_eq!(q.residue(), 1);
        assert_eq!(ApQuery::new(0, 0), Err(Error::ZeroModulus));
    }

    #[test]
    fn ap_main_term_examples() {
        let g = base(10);
        let t = ap_main_term(3, g, 11).unwrap();
        assert_eq!(t, BigRational::new(BigInt::from(90), BigInt::from(11)));
        let t = ap_main_term(3, g, 2).unwrap();
        assert_eq!(t, BigRational::from_integer(BigInt::from(40)));
        // the factor (1 - (d,g)/g) vanishes when g | d
        let t = ap_main_term(3, g, 10).unwrap();
        assert_eq!(t, BigRational::from_integer(BigInt::from(0)));
        let actual = count_ap(3, g, &ApQuery::new(0, 10).unwrap(), BUDGET).unwrap();
        assert_eq!(actual, 0);
        assert!(matches!(
            ap_main_term(3, g, 7),
            Err(Error::NotADivisor { .. })
        ));
        assert!(matches!(ap_main_term(4, g, 11), Err(Error::EvenLength(4))));
    }

    #[test]
    fn bt_majorant_examples() {
        let g = base(10);
        let b = bt_majorant(3, g, 1, true);
        assert!((b - 2.0 * 10.0 * 10.0f64.powf(1.5)).abs() < 1e-9);
        assert!(b >= 90.0);
        let b = bt_majorant(3, g, 11, true);
        assert!((b - 632.4555320336759 / 11.0f64.sqrt()).abs() < 1e-9);
        assert!(b >= 8.0);
        // the +1 applies only off the zero residue, and keeps the bound
        // from dropping below 1 however large q grows
        assert_eq!(
            bt_majorant(3, g, 11, false) - bt_majorant(3, g, 11, true),
            1.0
        );
        for length in [3u32, 6, 9] {
            let q = (10u128).pow(length) * 1_000_000;
            assert!(bt_majorant(length, g, q, false) >= 1.0);
        }
    }

    #[test]
    fn pstar_examples() {
        let g = base(10);
        assert_eq!(pstar_list(100, g, BUDGET).unwrap(), vec![1, 7]);
        assert_eq!(pstar_count(100, g, BUDGET).unwrap(), 2);
        assert_eq!(pstar_list(1, g, BUDGET).unwrap(), vec![1]);
        assert_eq!(pstar_list(10, base(2), BUDGET).unwrap(), vec![1, 5, 7]);
        assert_eq!(pstar_count(10, base(2), BUDGET).unwrap(), 3);
        assert_eq!(pstar_list(0, g, BUDGET), Err(Error::ZeroValue));
    }

    #[test]
    fn pstar_values_are_ascending_coprime_palindromes() {
        let g = base(10);
        let vs = pstar_list(100_000, g, BUDGET).unwrap();
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
        for &v in &vs {
            assert!(crate::digits::is_palindrome(v, g).unwrap());
            assert_eq!(gcd(v, 990), 1);
            assert!(v <= 100_000);
        }
    }

    #[test]
    fn divisor_profile_examples() {
        let p = divisor_profile(3, base(2), BUDGET).unwrap();
        assert_eq!(p.count(1), 2);
        assert_eq!(p.count(5), 1);
        assert_eq!(p.count(7), 1);
        assert_eq!(p.count(3), 0);
        assert_eq!(p.realized(), 3);

        let p = divisor_profile(3, base(10), BUDGET).unwrap();
        assert_eq!(p.total(), 90);
        assert_eq!(p.count(11), 8);
        // consistency with the one-pass multi-count
        let counts = count_multiples(3, base(10), &[1, 2, 3, 11], BUDGET).unwrap();
        assert_eq!(counts, vec![90, 40, 30, 8]);
        assert_eq!(p.count(2), 40);
        assert_eq!(p.count(3), 30);
    }

    #[test]
    fn divisor_profile_monotone_under_divisibility() {
        let p = divisor_profile(5, base(10), BUDGET).unwrap();
        let entries: Vec<(u64, u64)> = p.entries().map(|(d, e)| (d, e.count)).collect();
        for &(d, cd) in &entries {
            for &(e, ce) in &entries {
                if e != d && d % e == 0 {
                    assert!(cd <= ce, "c_{d} = {cd} > c_{e} = {ce}");
                }
            }
        }
        // omega tracks the divisor's prime count
        for (d, entry) in p.entries() {
            assert_eq!(
                entry.omega as u32,
                factorize(d as u128).unwrap().omega(),
                "d = {d}"
            );
        }
    }
}

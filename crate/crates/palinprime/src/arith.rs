//! Number-theoretic utilities and the exact constants of the main terms.
//!
//! Factorization is trial division against a sieved prime table up to 10^7
//! with the input bounded by 2^63. A remainder above 10^14 that survives
//! the table is classified exactly: a perfect square of a prime, a prime
//! (deterministic Miller-Rabin witnesses for u64), or out of range, which
//! is reported as an explicit error rather than attempted slowly.
//!
//! All main-term constants are kept as exact rationals; the single
//! irrational factor zeta(2) = pi^2/6 enters once, as a literal f64
//! constant, when converting to floating point.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::digits::Base;
use crate::{Error, Natural, Result};

/// Largest input accepted by [`factorize`].
pub const FACTOR_BOUND: Natural = 1 << 63;

/// zeta(2) = pi^2/6 as a literal constant, accurate to f64 precision.
pub const ZETA2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

const PRIME_LIMIT: u64 = 10_000_000;

static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();

/// Sieved primes below 10^7, built once and shared read-only.
fn primes() -> &'static [u32] {
    PRIMES.get_or_init(|| {
        let limit = PRIME_LIMIT as usize;
        let mut composite = vec![false; limit];
        let mut out = Vec::with_capacity(664_579);
        for p in 2..limit {
            if composite[p] {
                continue;
            }
            out.push(p as u32);
            let mut q = p * p;
            while q < limit {
                composite[q] = true;
                q += p;
            }
        }
        out
    })
}

/// Greatest common divisor; gcd(0, b) = b.
pub fn gcd(a: Natural, b: Natural) -> Natural {
    if a <= u64::MAX as u128 && b <= u64::MAX as u128 {
        gcd_u64(a as u64, b as u64) as u128
    } else {
        let (mut a, mut b) = (a, b);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
}

/// Binary gcd on u64, the hot path of the brute-force pair counter.
pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64 (the first twelve primes are a
/// proven-complete witness set below 3.3 * 10^24).
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn isqrt_u64(n: u64) -> u64 {
    let mut s = (n as f64).sqrt() as u64;
    while s > 0 && s.checked_mul(s).map(|v| v > n).unwrap_or(true) {
        s -= 1;
    }
    while (s + 1).checked_mul(s + 1).map(|v| v <= n).unwrap_or(false) {
        s += 1;
    }
    s
}

/// Largest r with r^n <= x.
pub fn nth_root_floor(x: Natural, n: u32) -> Natural {
    assert!(n >= 1);
    if x <= 1 || n == 1 {
        return x;
    }
    let (mut lo, mut hi) = (1u128, x);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match mid.checked_pow(n) {
            Some(p) if p <= x => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// Prime factorization of a bounded positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Prime-exponent pairs in increasing prime order.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn distinct_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// Complete prime factorization of n, 1 <= n <= 2^63.
pub fn factorize(n: Natural) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroValue);
    }
    if n > FACTOR_BOUND {
        return Err(Error::FactorBoundExceeded(n));
    }
    let mut m = n as u64;
    let mut factors = Vec::new();
    for &p in primes() {
        let p = p as u64;
        if p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if m > 1 {
        if m < PRIME_LIMIT * PRIME_LIMIT {
            // every prime factor of m exceeds the table limit, so m < 10^14
            // forces m prime
            factors.push((m, 1));
        } else {
            let s = isqrt_u64(m);
            if s * s == m {
                factors.push((s, 2));
            } else if is_prime_u64(m) {
                factors.push((m, 1));
            } else {
                return Err(Error::FactorizationOutOfRange(m));
            }
        }
    }
    Ok(Factorization {
        n: n as u64,
        factors,
    })
}

/// Möbius function: 0 unless n is squarefree, else (-1)^omega(n).
pub fn mobius(n: Natural) -> Result<i32> {
    let f = factorize(n)?;
    if !f.is_squarefree() {
        return Ok(0);
    }
    Ok(if f.omega() % 2 == 0 { 1 } else { -1 })
}

/// Divisor function tau(n): the number of divisors.
pub fn tau(n: Natural) -> Result<Natural> {
    let f = factorize(n)?;
    Ok(f.factors().iter().map(|&(_, e)| e as u128 + 1).product())
}

/// The 2^omega(n) squarefree divisors of n (divisors of its radical), in
/// increasing order.
pub fn squarefree_divisors(n: Natural) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    let mut divisors = vec![1u64];
    for p in f.distinct_primes() {
        let len = divisors.len();
        for i in 0..len {
            divisors.push(divisors[i] * p);
        }
    }
    divisors.sort_unstable();
    Ok(divisors)
}

fn ratio(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Render a reduced rational as "num/den" ("num" when the denominator is 1).
pub fn rational_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// The base-dependent rational factor of the fixed-length leading constant:
/// (g/(g-1))^2 for even g, (g + 1/3)/(g-1) for odd g.
pub fn rho(g: Base) -> BigRational {
    let gi = g.get() as i128;
    if gi % 2 == 0 {
        ratio(gi * gi, (gi - 1) * (gi - 1))
    } else {
        ratio(3 * gi + 1, 3 * (gi - 1))
    }
}

/// Exact product of p^2/(p^2 - 1) over the given primes.
fn inverse_one_minus_p2(primes: impl Iterator<Item = u64>) -> BigRational {
    let mut acc = BigRational::one();
    for p in primes {
        let p = p as i128;
        acc *= ratio(p * p, p * p - 1);
    }
    acc
}

/// Exact rational part of the fixed-length constant:
/// rho(g) * (1 - (2/g) * prod_{p|g} p/(p+1)).
pub fn thm1_rational(g: Base) -> BigRational {
    let f = factorize(g.get() as u128).expect("base is within the factorization bound");
    let mut prod = BigRational::one();
    for p in f.distinct_primes() {
        let p = p as i128;
        prod *= ratio(p, p + 1);
    }
    let gi = g.get() as i128;
    rho(g) * (BigRational::one() - ratio(2, gi) * prod)
}

/// Leading constant of the fixed-length coprime-pair density:
/// thm1_rational(g) / zeta(2).
pub fn thm1_constant(g: Base) -> f64 {
    rational_to_f64(&thm1_rational(g)) / ZETA2
}

/// Exact rational part of the value-bounded constant:
/// prod_{p | g^3-g} (1 - p^-2)^-1.
pub fn thm2_rational(g: Base) -> BigRational {
    let f = factorize(g.g3_minus_g() as u128).expect("g^3 - g is within the factorization bound");
    inverse_one_minus_p2(f.distinct_primes())
}

/// Leading constant of the coprime-to-g^3-g pair density:
/// thm2_rational(g) / zeta(2).
pub fn thm2_constant(g: Base) -> f64 {
    rational_to_f64(&thm2_rational(g)) / ZETA2
}

/// Limit of the restricted Möbius sum: sum over m coprime to q of
/// mu(m)/m^2 equals (1/zeta(2)) * prod_{p|q} (1 - p^-2)^-1.
///
/// Returns the exact rational product and the floating-point limit.
pub fn euler_restricted_mobius_sum_limit(q: Natural) -> Result<(BigRational, f64)> {
    let f = factorize(q)?;
    let exact = inverse_one_minus_p2(f.distinct_primes());
    let limit = rational_to_f64(&exact) / ZETA2;
    Ok((exact, limit))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("desk-scale rationals convert to f64")
}

/// Numerator and denominator as u64, when they fit.
pub fn rational_parts_u64(r: &BigRational) -> Option<(u64, u64)> {
    Some((r.numer().to_u64()?, r.denom().to_u64()?))
}

/// |a - b| as a nonnegative rational, for exact error audits.
pub fn rational_abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base(g: u64) -> Base {
        Base::new(g).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(1221, 990), 33);
        assert_eq!(gcd(7, 5), 1);
        assert_eq!(gcd(0, 9), 9);
        assert_eq!(gcd(9, 0), 9);
        assert_eq!(gcd(u128::MAX, 3), 3);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(
            factorize(990).unwrap().factors(),
            &[(2, 1), (3, 2), (5, 1), (11, 1)]
        );
        assert_eq!(factorize(1).unwrap().factors(), &[]);
        assert_eq!(
            factorize(1221).unwrap().factors(),
            &[(3, 1), (11, 1), (37, 1)]
        );
        assert_eq!(factorize(0), Err(Error::ZeroValue));
        assert_eq!(
            factorize(FACTOR_BOUND + 1),
            Err(Error::FactorBoundExceeded(FACTOR_BOUND + 1))
        );
        // 2^63 itself is the inclusive bound
        assert_eq!(factorize(FACTOR_BOUND).unwrap().factors(), &[(2, 63)]);
    }

    #[test]
    fn factorize_large_remainders() {
        // largest prime below 2^63: only Miller-Rabin can classify it
        let p: u128 = 9_223_372_036_854_775_783;
        assert_eq!(factorize(p).unwrap().factors(), &[(p as u64, 1)]);
        // square of a prime above the table limit
        let q: u64 = 10_000_019;
        assert_eq!(
            factorize((q as u128) * (q as u128)).unwrap().factors(),
            &[(q, 2)]
        );
        // semiprime with both factors above the table limit is out of range
        let n = 10_000_019u128 * 10_000_079;
        assert_eq!(factorize(n), Err(Error::FactorizationOutOfRange(n as u64)));
    }

    #[test]
    fn mobius_tau_examples() {
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(tau(12).unwrap(), 6);
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(tau(1).unwrap(), 1);
        assert_eq!(mobius(2).unwrap(), -1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(12).unwrap(), 0);
        assert_eq!(mobius(9 * 13).unwrap(), 0);
    }

    #[test]
    fn squarefree_divisors_examples() {
        assert_eq!(
            squarefree_divisors(990).unwrap(),
            vec![1, 2, 3, 5, 6, 10, 11, 15, 22, 30, 33, 55, 66, 110, 165, 330]
        );
        assert_eq!(squarefree_divisors(1).unwrap(), vec![1]);
        assert_eq!(squarefree_divisors(8).unwrap(), vec![1, 2]);
    }

    #[test]
    fn mobius_identity_up_to_1e4() {
        // sum over d | M of mu(d) = [M = 1]
        for m in 1u128..=10_000 {
            let sum: i64 = squarefree_divisors(m)
                .unwrap()
                .iter()
                .map(|&d| mobius(d as u128).unwrap() as i64)
                .sum();
            assert_eq!(sum, i64::from(m == 1), "M = {m}");
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(base(10)), ratio(100, 81));
        assert_eq!(rho(base(2)), ratio(4, 1));
        assert_eq!(rho(base(3)), ratio(5, 3));
        assert_eq!(rational_str(&rho(base(10))), "100/81");
        assert_eq!(rational_str(&rho(base(2))), "4");
    }

    #[test]
    fn thm1_examples() {
        assert_eq!(thm1_rational(base(10)), ratio(800, 729));
        assert_eq!(thm1_rational(base(2)), ratio(4, 3));
        assert_eq!(thm1_rational(base(3)), ratio(5, 6));
        assert!((thm1_constant(base(2)) - 0.810569).abs() < 1e-5);
        assert!((thm1_constant(base(3)) - 0.506606).abs() < 1e-5);
        assert!((thm1_constant(base(10)) - 800.0 / 729.0 / ZETA2).abs() < 1e-15);
    }

    #[test]
    fn thm2_examples() {
        assert_eq!(thm2_rational(base(10)), ratio(605, 384));
        assert_eq!(thm2_rational(base(2)), ratio(3, 2));
        assert_eq!(thm2_rational(base(3)), ratio(3, 2));
        assert!((thm2_constant(base(2)) - 0.911890).abs() < 1e-5);
        assert!((thm2_constant(base(10)) - 605.0 / 384.0 / ZETA2).abs() < 1e-15);
    }

    #[test]
    fn euler_restricted_examples() {
        let (r, f) = euler_restricted_mobius_sum_limit(1).unwrap();
        assert!(r.is_one());
        assert!((f - 1.0 / ZETA2).abs() < 1e-15);
        assert!((f - 0.607927).abs() < 1e-5);
        let (r, f) = euler_restricted_mobius_sum_limit(990).unwrap();
        assert_eq!(r, ratio(605, 384));
        assert!((f - thm2_constant(base(10))).abs() < 1e-15);
        let (r, f) = euler_restricted_mobius_sum_limit(6).unwrap();
        assert_eq!(r, ratio(3, 2));
        assert!((f - thm2_constant(base(2))).abs() < 1e-15);
    }

    #[test]
    fn restricted_partial_sums_converge_to_limit() {
        // linear sieve for mu up to 10^6, test scaffolding only
        let limit = 1_000_000usize;
        let mut spf = vec![0u32; limit + 1];
        let mut mu = vec![0i8; limit + 1];
        let mut ps: Vec<u32> = Vec::new();
        mu[1] = 1;
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                mu[i] = -1;
                ps.push(i as u32);
            }
            for &p in &ps {
                let ip = i * p as usize;
                if ip > limit || p > spf[i] {
                    break;
                }
                spf[ip] = p;
                mu[ip] = if i % p as usize == 0 { 0 } else { -mu[i] };
            }
        }
        for &q in &[1u128, 6, 990] {
            let (_, lim) = euler_restricted_mobius_sum_limit(q).unwrap();
            let mut partial = 0.0f64;
            let mut next_check = 2usize;
            for (m, &mu_m) in mu.iter().enumerate().skip(1) {
                if gcd(m as u128, q) == 1 {
                    partial += mu_m as f64 / (m as f64 * m as f64);
                }
                if m == next_check {
                    assert!(
                        (partial - lim).abs() <= 2.0 / m as f64,
                        "q = {q}, U = {m}: |{partial} - {lim}| > 2/U"
                    );
                    next_check *= 10;
                }
            }
            assert!((partial - lim).abs() <= 2.0 / limit as f64);
        }
    }

    #[test]
    fn nth_root_floor_examples() {
        assert_eq!(nth_root_floor(65536, 5), 9);
        assert_eq!(nth_root_floor(10_000_000, 10), 5);
        assert_eq!(nth_root_floor(1, 5), 1);
        assert_eq!(nth_root_floor(0, 3), 0);
        assert_eq!(nth_root_floor(1 << 40, 5), 256);
        assert_eq!(nth_root_floor(u128::MAX, 2), (1u128 << 64) - 1);
    }

    proptest! {
        #[test]
        fn factorize_round_trip(n in 1u128..10_000_000_000_000u128) {
            let f = factorize(n).unwrap();
            let back: u128 = f
                .factors()
                .iter()
                .map(|&(p, e)| (p as u128).pow(e))
                .product();
            prop_assert_eq!(back, n);
            let mut ps: Vec<u64> = f.distinct_primes().collect();
            ps.dedup();
            prop_assert_eq!(ps.len() as u32, f.omega());
        }

        #[test]
        fn tau_at_most_n(n in 1u128..1_000_000u128) {
            prop_assert!(tau(n).unwrap() <= n);
        }

        #[test]
        fn mobius_vanishes_on_squares(k in 1u128..1_000_000u128, p in prop::sample::select(vec![2u128, 3, 5, 7, 11])) {
            prop_assert_eq!(mobius(p * p * k).unwrap(), 0);
        }

        #[test]
        fn gcd_divides_both(a in 1u128..u64::MAX as u128, b in 1u128..u64::MAX as u128) {
            let d = gcd(a, b);
            prop_assert!(d > 0);
            prop_assert_eq!(a % d, 0);
            prop_assert_eq!(b % d, 0);
            prop_assert_eq!(gcd(a / d, b / d), 1);
        }

        #[test]
        fn nth_root_is_floor(x in 0u128..u128::MAX, n in 2u32..12) {
            let r = nth_root_floor(x, n);
            prop_assert!(r.checked_pow(n).map(|p| p <= x).unwrap_or(false) || x == 0);
            if let Some(p) = (r + 1).checked_pow(n) {
                prop_assert!(p > x);
            }
        }
    }
}

//! Exponential sums over palindromes: psi, Phi_N, S(N; alpha) and the
//! discrepancy diagnostics built from them.
//!
//! The delicate part is evaluating e(alpha * n) for n comparable to
//! g^(2N+1): forming alpha * n in floating point first loses the entire
//! fractional part. Angles therefore reduce products exactly. A raw f64
//! angle is treated as the exact rational mantissa * 2^exp it denotes, so
//! frac(alpha * n) comes from an integer product reduced mod a power of
//! two; a Farey angle h/q + k/(g^3-g) reduces n modulo q and g^3-g
//! exactly. Either way the fractional part carries only one rounding.
//!
//! Direct sums use compensated (Neumaier) accumulation, sharded by the
//! leading free digit with a fixed merge order, so results are
//! deterministic and independent of thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::gcd;
use crate::census::{count_formula, shard_map};
use crate::digits::{self, Base};
use crate::{Error, Natural, Result};

const MANT_MASK: u64 = (1 << 52) - 1;

/// Re-anchor incremental rotations to an exactly reduced angle this often.
const RESYNC_INTERVAL: u32 = 4096;

/// An angle interpreted modulo 1.
///
/// `Real` wraps an f64 (reduced mod 1, negative inputs tracked by sign so
/// conjugate symmetry is exact). `Farey` is the exact fraction
/// h/q + k/denom used for rational sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Real { frac: f64, negated: bool },
    Farey { h: u64, q: u64, k: u64, denom: u64 },
}

impl Angle {
    /// Reduce a real angle mod 1. The sign is kept separately so that
    /// `real(-x)` evaluates to the exact conjugate of `real(x)`.
    pub fn real(alpha: f64) -> Self {
        let negated = alpha < 0.0;
        Angle::Real {
            frac: alpha.abs().fract(),
            negated,
        }
    }

    /// The exact fraction h/q + k/denom; h and k are normalized into
    /// [0, q) and [0, denom).
    pub fn farey(h: i64, q: u64, k: i64, denom: u64) -> Result<Self> {
        if q == 0 || denom == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(Angle::Farey {
            h: h.rem_euclid(q as i64) as u64,
            q,
            k: k.rem_euclid(denom as i64) as u64,
            denom,
        })
    }

    /// Fractional part of alpha * t in [0, 1), with a single rounding.
    pub fn frac_times(&self, t: Natural) -> f64 {
        match *self {
            Angle::Real { frac, negated } => {
                let f = frac_exact(frac, t);
                if negated && f > 0.0 {
                    let r = 1.0 - f;
                    if r >= 1.0 {
                        0.0
                    } else {
                        r
                    }
                } else {
                    f
                }
            }
            Angle::Farey { h, q, k, denom } => {
                let a = (h as u128 * (t % q as u128)) % q as u128;
                let b = (k as u128 * (t % denom as u128)) % denom as u128;
                let f = a as f64 / q as f64 + b as f64 / denom as f64;
                if f >= 1.0 {
                    f - 1.0
                } else {
                    f
                }
            }
        }
    }

    /// e(alpha * t) as a unit complex number. For negated real angles this
    /// is the bit-exact conjugate of the positive evaluation.
    pub fn unit(&self, t: Natural) -> Complex64 {
        match *self {
            Angle::Real { frac, negated } => {
                let z = e2pi(frac_exact(frac, t));
                if negated {
                    z.conj()
                } else {
                    z
                }
            }
            _ => e2pi(self.frac_times(t)),
        }
    }

    /// The angle as a plain f64 in [0, 1), for display.
    pub fn approx(&self) -> f64 {
        match *self {
            Angle::Real { frac, negated } => {
                if negated && frac > 0.0 {
                    1.0 - frac
                } else {
                    frac
                }
            }
            Angle::Farey { h, q, k, denom } => {
                let f = h as f64 / q as f64 + k as f64 / denom as f64;
                if f >= 1.0 {
                    f - 1.0
                } else {
                    f
                }
            }
        }
    }
}

/// frac(alpha * t) for alpha in [0, 1), treating alpha as the exact
/// rational mantissa * 2^exp.
fn frac_exact(alpha: f64, t: Natural) -> f64 {
    debug_assert!((0.0..1.0).contains(&alpha));
    if alpha == 0.0 || t == 0 {
        return 0.0;
    }
    let bits = alpha.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let (mant, e) = if exp_field == 0 {
        (bits & MANT_MASK, -1074)
    } else {
        ((bits & MANT_MASK) | (1 << 52), exp_field - 1075)
    };
    let s = -e as u32;
    let f = match (mant as u128).checked_mul(t) {
        Some(p) => {
            if s >= 128 {
                // alpha * t < 2^(128 - s) <= 1 already
                p as f64 * 2f64.powi(e)
            } else {
                let r = p & ((1u128 << s) - 1);
                r as f64 * 2f64.powi(e)
            }
        }
        // beyond the exact window; plain float is the best we can do
        None => (alpha * t as f64).fract(),
    };
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// e(x) = exp(2 pi i x) for x given by its fractional part.
///
/// Evaluated on [0, 1/2] and reflected, so conjugate angle pairs produce
/// bit-exact conjugate values.
pub fn e2pi(frac: f64) -> Complex64 {
    if frac > 0.5 {
        let theta = std::f64::consts::TAU * (1.0 - frac);
        Complex64::new(theta.cos(), -theta.sin())
    } else {
        let theta = std::f64::consts::TAU * frac;
        Complex64::new(theta.cos(), theta.sin())
    }
}

#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Copy, Default)]
struct NeumaierC {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierC {
    #[inline]
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// psi(alpha) = sum over 0 <= n < g of e(alpha n); |psi| <= g.
pub fn psi(alpha: &Angle, g: Base) -> Complex64 {
    psi_scaled(alpha, 1, g)
}

/// psi(alpha * t) evaluated with the product alpha * t * n reduced exactly.
pub fn psi_scaled(alpha: &Angle, t: Natural, g: Base) -> Complex64 {
    let mut sum = NeumaierC::default();
    for n in 0..g.get() {
        let term = match t.checked_mul(n as u128) {
            Some(tn) => alpha.unit(tn),
            // beyond the exact window; plain float angle arithmetic
            None => e2pi((alpha.approx() * t as f64 * n as f64).fract()),
        };
        sum.add(term);
    }
    sum.total()
}

/// Phi_N(alpha) = product over 1 <= i < N of |psi(alpha (g^i + g^(2N-i)))|.
///
/// The empty product at N = 1 is 1; Phi_N(0) = g^(N-1).
pub fn phi(half_length: u32, alpha: &Angle, g: Base) -> Result<f64> {
    if half_length == 0 {
        return Err(Error::ZeroLength);
    }
    let n = half_length;
    let b = g.get() as u128;
    let mut product = 1.0f64;
    for i in 1..n {
        let t = b
            .checked_pow(i)
            .zip(b.checked_pow(2 * n - i))
            .and_then(|(lo, hi)| lo.checked_add(hi))
            .ok_or(Error::Overflow("Phi weight"))?;
        product *= psi_scaled(alpha, t, g).norm();
    }
    Ok(product)
}

/// S(length; alpha) = sum over palindromes of that length of e(alpha n),
/// summed term by term in rank order with compensation.
///
/// Each shard walks its free-digit counter and advances e(alpha n) by one
/// precomputed rotation per digit change, re-anchoring to the exactly
/// reduced angle every [`RESYNC_INTERVAL`] terms.
pub fn s_direct(length: u32, alpha: &Angle, g: Base, budget: u64) -> Result<Complex64> {
    let count = count_formula(length, g)?;
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: count,
            budget,
        });
    }
    // under the budget every weight times (g - 1) stays far below 2^128
    let weights = digits::free_weights(length, g)?;
    let b = g.get();
    let step: Vec<Complex64> = weights.iter().map(|&w| alpha.unit(w)).collect();
    let unwind: Vec<Complex64> = weights
        .iter()
        .map(|&w| alpha.unit(w * (b as u128 - 1)).conj())
        .collect();
    let shards = shard_map(length, g, budget, |walk| {
        let mut digits_state: Vec<u64> = Vec::new();
        let mut value: Natural = 0;
        let mut cur = Complex64::new(1.0, 0.0);
        let mut since_sync = 0u32;
        let mut sum = NeumaierC::default();
        let mut first = true;
        let mut walk = walk;
        // pull the first value to seed digits and the rotation state
        if let Some(v0) = walk.next() {
            value = v0;
            digits_state = digits::to_digits(v0, g)?.digits()[..weights.len()].to_vec();
            cur = alpha.unit(v0);
            sum.add(cur);
            first = false;
        }
        if first {
            return Ok(Complex64::new(0.0, 0.0));
        }
        for v in walk {
            // mirror the walker's carry chain on the rotation state
            let mut j = digits_state.len() - 1;
            loop {
                digits_state[j] += 1;
                if digits_state[j] < b {
                    value += weights[j];
                    cur *= step[j];
                    break;
                }
                digits_state[j] = 0;
                value -= (b as u128 - 1) * weights[j];
                cur *= unwind[j];
                j -= 1;
            }
            debug_assert_eq!(value, v);
            since_sync += 1;
            if since_sync == RESYNC_INTERVAL {
                cur = alpha.unit(value);
                since_sync = 0;
            }
            sum.add(cur);
        }
        Ok(sum.total())
    })?;
    let mut total = NeumaierC::default();
    for z in shards {
        total.add(z);
    }
    Ok(total.total())
}

/// One evaluation of the |S(2N+1; alpha)| <= g^2 Phi_N(alpha) inequality.
///
/// The right-hand side carries the explicit constant g^2 (the two digit
/// sums bounded trivially by g in the factorization of S) plus a slack of
/// 1e-9 * g^N for floating-point headroom.
#[derive(Debug, Clone, Copy)]
pub struct Lemma33Audit {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn lemma33_audit(
    half_length: u32,
    alpha: &Angle,
    g: Base,
    budget: u64,
) -> Result<Lemma33Audit> {
    let n = half_length;
    let lhs = s_direct(2 * n + 1, alpha, g, budget)?.norm();
    let gf = g.get() as f64;
    let rhs = gf * gf * phi(n, alpha, g)? + 1e-9 * gf.powi(n as i32);
    Ok(Lemma33Audit {
        lhs,
        rhs,
        ok: lhs <= rhs,
    })
}

/// Per-class censused counts for one modulus q: counts[k * q + a] is
/// #Pi_{k,g}(2N+1; a, q) and totals[k] is #Pi_{k,g}(2N+1).
fn class_discrepancy_max(values: &[u64], m: u64, q: u64) -> f64 {
    let mut counts = vec![0u32; (m * q) as usize];
    let mut totals = vec![0u64; m as usize];
    for &v in values {
        let k = v % m;
        let a = v % q;
        counts[(k * q + a) as usize] += 1;
        totals[k as usize] += 1;
    }
    let mut worst = 0.0f64;
    let q = q as usize;
    for k in 0..m as usize {
        if totals[k] == 0 {
            continue;
        }
        let expected = totals[k] as f64 / q as f64;
        for a in 0..q {
            let dev = (counts[k * q + a] as f64 - expected).abs();
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// Left-hand side of the averaged-discrepancy bound: the sum over q <= Q
/// coprime to g^3 - g of q^(-1/2) max over (a, k) of
/// |#Pi_{k,g}(2N+1; a, q) - #Pi_{k,g}(2N+1)/q|, computed exactly by
/// census. The q = 1 term vanishes identically.
pub fn bv_discrepancy(max_q: u64, half_length: u32, g: Base, budget: u64) -> Result<f64> {
    Ok(bv_discrepancy_terms(max_q, half_length, g, budget)?
        .into_iter()
        .map(|(_, _, term)| term)
        .sum())
}

/// Per-modulus breakdown of [`bv_discrepancy`]: (q, max deviation,
/// weighted term), for admissible q in increasing order.
pub fn bv_discrepancy_terms(
    max_q: u64,
    half_length: u32,
    g: Base,
    budget: u64,
) -> Result<Vec<(u64, f64, f64)>> {
    let length = 2 * half_length + 1;
    let count = count_formula(length, g)?;
    if count > budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: count,
            budget,
        });
    }
    let top = (g.get() as u128)
        .checked_pow(length)
        .ok_or(Error::Overflow("palindrome range"))?;
    if top > u64::MAX as u128 {
        return Err(Error::Overflow("bv census values"));
    }
    let m = g.g3_minus_g();
    let values: Vec<u64> = digits::Palindromes::new(length, g)?
        .map(|v| v as u64)
        .collect();
    let qs: Vec<u64> = (1..=max_q)
        .filter(|&q| gcd(q as u128, m as u128) == 1)
        .collect();
    qs.into_par_iter()
        .map(|q| {
            let worst = class_discrepancy_max(&values, m, q);
            Ok((q, worst, worst / (q as f64).sqrt()))
        })
        .collect()
}

/// Sum over 2 <= q <= Q coprime to g^3 - g of the Phi_N values at the
/// Farey points h/q + k/(g^3 - g), h running over reduced residues mod q.
pub fn phi_farey_sum(max_q: u64, half_length: u32, k: i64, g: Base) -> Result<f64> {
    Ok(phi_farey_terms(max_q, half_length, k, g)?
        .into_iter()
        .map(|(_, _, s)| s)
        .sum())
}

/// Per-modulus breakdown of [`phi_farey_sum`]: (q, reduced residue count,
/// Phi sum over those residues).
pub fn phi_farey_terms(
    max_q: u64,
    half_length: u32,
    k: i64,
    g: Base,
) -> Result<Vec<(u64, u64, f64)>> {
    let m = g.g3_minus_g();
    let qs: Vec<u64> = (2..=max_q)
        .filter(|&q| gcd(q as u128, m as u128) == 1)
        .collect();
    qs.into_par_iter()
        .map(|q| {
            let mut sum = 0.0f64;
            let mut residues = 0u64;
            for h in 1..q {
                if gcd(h as u128, q as u128) != 1 {
                    continue;
                }
                residues += 1;
                let angle = Angle::farey(h as i64, q, k, m)?;
                sum += phi(half_length, &angle, g)?;
            }
            Ok((q, residues, sum))
        })
        .collect()
}

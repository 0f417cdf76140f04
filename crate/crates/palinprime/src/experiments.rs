//! Report-producing runners behind the CLI subcommands.
//!
//! Each runner wires census/coprime/expsum operations into a [`Report`]
//! so the CLI and the acceptance suite share one code path. Runners are
//! deterministic for a fixed configuration and seed.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{
    euler_restricted_mobius_sum_limit, rational_str, rational_to_f64, rho, thm1_constant,
    thm1_rational, thm2_constant, thm2_rational, ZETA2,
};
use crate::census::{
    ap_main_term, bt_majorant, count_ap, count_enumerated, count_formula, count_multiples,
    pstar_count, pstar_list, residue_spectrum, ApQuery, DEFAULT_ENUM_BUDGET,
};
use crate::coprime::{
    convergence_report, coprime_pairs_brute, coprime_pairs_sieve, default_threshold_fixed,
    default_threshold_pstar, pstar_coprime_pairs, ConvergenceMode, ConvergenceRow, SieveResult,
    DEFAULT_PAIR_BUDGET,
};
use crate::digits::{Base, Palindromes};
use crate::expsum::{bv_discrepancy_terms, lemma33_audit, phi_farey_terms, s_direct, Angle};
use crate::report::{Cell, Report};
use crate::{Error, Natural, Result};

/// Resource limits shared by the runners.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    /// Palindromes an exhaustive operation may walk.
    pub budget: u64,
    /// Ordered pairs the brute-force counter may visit.
    pub pair_budget: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            budget: DEFAULT_ENUM_BUDGET,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    seed ^ a.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ b.wrapping_mul(0xd1b5_4a32_d192_ed03)
}

/// List palindromes of one length with their ranks.
pub fn run_enumerate(g: Base, length: u32, settings: &Settings) -> Result<Report> {
    let count = count_formula(length, g)?;
    if count > settings.budget as u128 {
        return Err(Error::BudgetExceeded {
            needed: count,
            budget: settings.budget,
        });
    }
    let mut report = Report::new("enumerate")
        .config("base", g.get())
        .config("length", length)
        .columns(&["rank", "value"]);
    for (rank, v) in Palindromes::new(length, g)?.enumerate() {
        report.push_row(vec![Cell::from(rank as u128), Cell::from(v)]);
    }
    report.summarize("count", count);
    Ok(report)
}

/// Compare the closed-form count with full enumeration for every length
/// whose population fits under `count_cap`.
pub fn run_census(g: Base, count_cap: u64, settings: &Settings) -> Result<Report> {
    let mut report = Report::new("census")
        .config("base", g.get())
        .config("count_cap", count_cap)
        .columns(&["length", "count_formula", "count_enumerated", "agree"]);
    let mut all_agree = true;
    let mut length = 1u32;
    loop {
        let formula = count_formula(length, g)?;
        if formula > count_cap as u128 {
            break;
        }
        let enumerated = count_enumerated(length, g, settings.budget)?;
        let agree = enumerated == formula;
        all_agree &= agree;
        report.push_row(vec![
            Cell::from(length),
            Cell::from(formula),
            Cell::from(enumerated),
            Cell::from(agree),
        ]);
        length += 1;
    }
    report.summarize("lengths", (length - 1) as u64);
    report.summarize("all_agree", all_agree);
    Ok(report)
}

/// Check that every even-length palindrome is divisible by g + 1,
/// exhaustively over the lengths whose population fits under `count_cap`.
pub fn run_even_divisibility(g: Base, count_cap: u64, settings: &Settings) -> Result<Report> {
    let mut report = Report::new("census")
        .config("base", g.get())
        .config("check", "even-divisibility")
        .config("count_cap", count_cap)
        .columns(&["length", "count", "violations"]);
    let divisor = g.get() as u128 + 1;
    let mut total_violations: u128 = 0;
    let mut length = 2u32;
    loop {
        let count = count_formula(length, g)?;
        if count > count_cap as u128 {
            break;
        }
        let shards = crate::census::shard_map(length, g, settings.budget, |walk| {
            Ok(walk.filter(|v| v % divisor != 0).count() as u128)
        })?;
        let violations: u128 = shards.into_iter().sum();
        total_violations += violations;
        report.push_row(vec![
            Cell::from(length),
            Cell::from(count),
            Cell::from(violations),
        ]);
        length += 2;
    }
    report.summarize("total_violations", total_violations);
    Ok(report)
}

/// Count palindromes in one progression, or in every residue class of the
/// modulus.
#[allow(clippy::too_many_arguments)]
pub fn run_ap(
    g: Base,
    length: u32,
    q: Natural,
    a: i128,
    k: Option<i128>,
    all_residues: bool,
    settings: &Settings,
) -> Result<Report> {
    let mut report = Report::new("ap")
        .config("base", g.get())
        .config("length", length)
        .config("modulus", q)
        .columns(&["length", "q", "a", "k", "count"]);
    let k_cell = |k: Option<u64>| k.map_or(Cell::from(""), |k| Cell::from(k as u128));
    if all_residues {
        let q64 = u64::try_from(q).map_err(|_| Error::Overflow("residue spectrum size"))?;
        let knorm = match k {
            Some(k) => Some(ApQuery::new(0, q)?.with_class(k, g)?.class().unwrap()),
            None => None,
        };
        let spectrum = residue_spectrum(length, g, q64, knorm, settings.budget)?;
        for (a, &count) in spectrum.iter().enumerate() {
            report.push_row(vec![
                Cell::from(length),
                Cell::from(q),
                Cell::from(a as u128),
                k_cell(knorm),
                Cell::from(count),
            ]);
        }
        report.summarize("total", spectrum.iter().sum::<u128>());
    } else {
        let mut query = ApQuery::new(a, q)?;
        if let Some(k) = k {
            query = query.with_class(k, g)?;
        }
        let count = count_ap(length, g, &query, settings.budget)?;
        report.push_row(vec![
            Cell::from(length),
            Cell::from(q),
            Cell::from(query.residue()),
            k_cell(query.class()),
            Cell::from(count),
        ]);
        report.summarize("total", count);
    }
    Ok(report)
}

/// Audit the closed-form main term for palindromes divisible by each
/// divisor of g^3 - g: the absolute error must stay within g^2.
pub fn run_lemma34_audit(g: Base, count_cap: u64, settings: &Settings) -> Result<Report> {
    let mut report = Report::new("lemma34-audit")
        .config("base", g.get())
        .config("count_cap", count_cap)
        .config("threshold", (g.get() * g.get()) as u128)
        .columns(&[
            "length",
            "d",
            "count",
            "main_term",
            "main_term_real",
            "abs_error",
            "ok",
        ]);
    let divisors = all_divisors(g.g3_minus_g());
    let threshold =
        num_rational::BigRational::from_integer(num_bigint::BigInt::from(g.get() * g.get()));
    let mut max_error = 0.0f64;
    let mut all_ok = true;
    let mut length = 1u32;
    loop {
        let formula = count_formula(length, g)?;
        if formula > count_cap as u128 {
            break;
        }
        let counts = count_multiples(length, g, &divisors, settings.budget)?;
        for (&d, &count) in divisors.iter().zip(&counts) {
            let main = ap_main_term(length, g, d)?;
            let diff = crate::arith::rational_abs_diff(
                &num_rational::BigRational::from_integer(num_bigint::BigInt::from(count)),
                &main,
            );
            let ok = diff <= threshold;
            all_ok &= ok;
            let err = rational_to_f64(&diff);
            max_error = max_error.max(err);
            report.push_row(vec![
                Cell::from(length),
                Cell::from(d),
                Cell::from(count),
                Cell::from(rational_str(&main)),
                Cell::from(rational_to_f64(&main)),
                Cell::from(err),
                Cell::from(ok),
            ]);
        }
        length += 2;
    }
    report.summarize("max_abs_error", max_error);
    report.summarize("all_ok", all_ok);
    Ok(report)
}

/// All divisors of n (not only squarefree ones), ascending.
fn all_divisors(n: u64) -> Vec<u64> {
    // n = g^3 - g is within the factorization bound by construction
    let f = crate::arith::factorize(n as u128).expect("bounded");
    let mut divisors = vec![1u64];
    for &(p, e) in f.factors() {
        let len = divisors.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divisors.push(divisors[i] * pk);
            }
        }
    }
    divisors.sort_unstable();
    divisors
}

/// Audit the explicit Brun-Titchmarsh majorant over all moduli up to
/// `max_q`, with seeded residue samples, the count <= 1 check for
/// q >= g^length, and the regression showing the "+1" term is required.
#[allow(clippy::too_many_arguments)]
pub fn run_bt_audit(
    g: Base,
    max_length: u32,
    max_q: u64,
    samples_per_q: u32,
    seed: u64,
    settings: &Settings,
) -> Result<Report> {
    let mut report = Report::new("bt-audit")
        .config("base", g.get())
        .config("max_length", max_length)
        .config("max_q", max_q)
        .config("samples_per_q", samples_per_q)
        .config("seed", seed)
        .columns(&[
            "length",
            "moduli",
            "majorant_violations",
            "qlarge_violations",
            "max_count_over_majorant",
            "remark_q",
            "remark_count",
            "remark_kernel",
            "remark_ok",
        ]);
    let mut total_violations: u128 = 0;
    let mut remark_all_ok = true;
    for length in 1..=max_length {
        let count = count_formula(length, g)?;
        if count > settings.budget as u128 {
            return Err(Error::BudgetExceeded {
                needed: count,
                budget: settings.budget,
            });
        }
        let top = (g.get() as u128).checked_pow(length);
        let values: Vec<u64> = Palindromes::new(length, g)?.map(|v| v as u64).collect();
        let per_q: Vec<(u64, u64, f64)> = (1..=max_q)
            .into_par_iter()
            .map(|q| {
                let mut counts = vec![0u64; q as usize];
                for &v in &values {
                    counts[(v % q) as usize] += 1;
                }
                let mut majorant_violations = 0u64;
                let mut qlarge_violations = 0u64;
                let mut max_ratio = 0.0f64;
                let mut check = |a: u64| {
                    let c = counts[a as usize] as f64;
                    let bound = bt_majorant(length, g, q as u128, a == 0);
                    if c > bound {
                        majorant_violations += 1;
                    }
                    if bound > 0.0 {
                        max_ratio = max_ratio.max(c / bound);
                    }
                };
                check(0);
                let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, length as u64, q));
                for _ in 0..samples_per_q {
                    check(rng.gen_range(0..q));
                }
                if top.is_some_and(|t| q as u128 >= t) {
                    qlarge_violations += counts.iter().filter(|&&c| c > 1).count() as u64;
                }
                (majorant_violations, qlarge_violations, max_ratio)
            })
            .collect();
        let majorant_violations: u64 = per_q.iter().map(|r| r.0).sum();
        let qlarge_violations: u64 = per_q.iter().map(|r| r.1).sum();
        let max_ratio = per_q.iter().map(|r| r.2).fold(0.0f64, f64::max);
        total_violations += (majorant_violations + qlarge_violations) as u128;

        // regression for the necessity of the "+1": pick a palindrome as
        // the residue and a modulus so large the kernel drops below 1/2
        let (remark_q, remark_count, remark_kernel, remark_ok) = if length >= 2 {
            let gi = g.get() as u128;
            let q_large = 4 * gi * gi * gi.pow(length) + 1;
            let a = gi.pow(length - 1) + 1;
            let query = ApQuery::new(a as i128, q_large)?;
            let c = count_ap(length, g, &query, settings.budget)?;
            let kernel = (g.get() as f64).powf(length as f64 / 2.0) / (q_large as f64).sqrt();
            let ok = c >= 1 && kernel < 0.5;
            (q_large, c, kernel, ok)
        } else {
            (0, 0, 0.0, true)
        };
        remark_all_ok &= remark_ok;

        report.push_row(vec![
            Cell::from(length),
            Cell::from(max_q),
            Cell::from(majorant_violations),
            Cell::from(qlarge_violations),
            Cell::from(max_ratio),
            Cell::from(remark_q),
            Cell::from(remark_count),
            Cell::from(remark_kernel),
            Cell::from(remark_ok),
        ]);
    }
    report.summarize("total_violations", total_violations);
    report.summarize("remark_all_ok", remark_all_ok);
    Ok(report)
}

/// Audit |S(2N+1; alpha)| <= g^2 Phi_N(alpha) + 1e-9 g^N over seeded
/// uniform angles, plus the exactness of S at alpha = 0.
pub fn run_lemma33_audit(
    g: Base,
    max_half_length: u32,
    samples: u32,
    seed: u64,
    settings: &Settings,
) -> Result<Report> {
    let mut report = Report::new("lemma33-audit")
        .config("base", g.get())
        .config("max_half_length", max_half_length)
        .config("samples", samples)
        .config("seed", seed)
        .columns(&[
            "half_length",
            "length",
            "samples",
            "violations",
            "max_lhs_over_rhs",
            "s0_exact_ok",
        ]);
    let mut total_violations: u128 = 0;
    let mut all_s0_ok = true;
    for n in 1..=max_half_length {
        let length = 2 * n + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, g.get(), n as u64));
        let alphas: Vec<f64> = (0..samples).map(|_| rng.gen::<f64>()).collect();
        let audits: Vec<(bool, f64)> = alphas
            .par_iter()
            .map(|&alpha| {
                let audit = lemma33_audit(n, &Angle::real(alpha), g, settings.budget)?;
                Ok((audit.ok, audit.lhs / audit.rhs))
            })
            .collect::<Result<_>>()?;
        let violations = audits.iter().filter(|(ok, _)| !ok).count() as u128;
        let max_ratio = audits.iter().map(|&(_, r)| r).fold(0.0f64, f64::max);
        total_violations += violations;
        let expect = count_formula(length, g)? as f64;
        let s0 = s_direct(length, &Angle::real(0.0), g, settings.budget)?;
        let s0_ok = (s0.re - expect).abs() <= 1e-9 * expect && s0.im.abs() <= 1e-9 * expect;
        all_s0_ok &= s0_ok;
        report.push_row(vec![
            Cell::from(n),
            Cell::from(length),
            Cell::from(samples),
            Cell::from(violations),
            Cell::from(max_ratio),
            Cell::from(s0_ok),
        ]);
    }
    report.summarize("total_violations", total_violations);
    report.summarize("all_s0_ok", all_s0_ok);
    Ok(report)
}

fn threshold_from_exponent(scale: Natural, exponent: Option<f64>, default: Natural) -> Natural {
    match exponent {
        None => default,
        Some(e) => {
            let u = ((scale as f64).powf(e) + 1e-9).floor();
            if u < 1.0 {
                1
            } else {
                u as u128
            }
        }
    }
}

fn push_sieve_row(report: &mut Report, scale: Natural, result: &SieveResult, predicted: f64) {
    let ratio = result.total as f64 / result.pair_universe as f64;
    report.push_row(vec![
        Cell::from(scale),
        Cell::from(result.threshold),
        Cell::from(result.total),
        Cell::from(result.n1),
        Cell::from(result.n2),
        Cell::from(result.pair_universe),
        Cell::from(ratio),
        Cell::from(predicted),
        Cell::from((ratio - predicted).abs() / predicted),
    ]);
}

const SIEVE_COLUMNS: [&str; 9] = [
    "scale",
    "threshold",
    "total",
    "n1",
    "n2",
    "universe",
    "ratio",
    "predicted",
    "relative_deviation",
];

/// Möbius-sieve coprime pair count for one fixed odd length, optionally
/// cross-checked against the brute-force counter.
pub fn run_coprime_fixed(
    g: Base,
    half_length: u32,
    u_exponent: Option<f64>,
    with_brute: bool,
    settings: &Settings,
) -> Result<Report> {
    let length = 2 * half_length + 1;
    let scale_base = (g.get() as u128)
        .checked_pow(half_length)
        .ok_or(Error::Overflow("threshold"))?;
    let threshold = threshold_from_exponent(
        scale_base,
        u_exponent,
        default_threshold_fixed(g, half_length)?,
    );
    let result = coprime_pairs_sieve(length, g, threshold, settings.budget)?;
    let predicted = thm1_constant(g);
    let mut report = Report::new("coprime")
        .config("base", g.get())
        .config("half_length", half_length)
        .config("length", length)
        .config("mode", "fixed-length")
        .columns(&SIEVE_COLUMNS);
    push_sieve_row(&mut report, half_length as u128, &result, predicted);
    report.summarize("total", Cell::Int(result.total));
    report.summarize("universe", result.pair_universe);
    if with_brute {
        let values: Vec<Natural> = Palindromes::new(length, g)?.collect();
        let brute = coprime_pairs_brute(&values, settings.pair_budget)?;
        report.summarize("brute", brute);
        report.summarize("brute_matches", brute == result.total as u128);
    }
    Ok(report)
}

/// Möbius-sieve coprime pair count over P*(x), optionally cross-checked
/// against the brute-force counter.
pub fn run_coprime_pstar(
    g: Base,
    x: Natural,
    u_exponent: Option<f64>,
    with_brute: bool,
    settings: &Settings,
) -> Result<Report> {
    let threshold = threshold_from_exponent(x, u_exponent, default_threshold_pstar(x));
    let result = pstar_coprime_pairs(x, g, threshold, settings.budget)?;
    let predicted = thm2_constant(g);
    let mut report = Report::new("coprime")
        .config("base", g.get())
        .config("x", x)
        .config("mode", "pstar")
        .columns(&SIEVE_COLUMNS);
    push_sieve_row(&mut report, x, &result, predicted);
    report.summarize("total", Cell::Int(result.total));
    report.summarize("universe", result.pair_universe);
    if with_brute {
        let values = pstar_list(x, g, settings.budget)?;
        let brute = coprime_pairs_brute(&values, settings.pair_budget)?;
        report.summarize("brute", brute);
        report.summarize("brute_matches", brute == result.total as u128);
    }
    Ok(report)
}

/// Census of P*(x) at each bound: the count and its ratio to sqrt(x).
pub fn run_pstar(g: Base, xs: &[Natural], settings: &Settings) -> Result<Report> {
    let mut report =
        Report::new("pstar")
            .config("base", g.get())
            .columns(&["x", "count", "count_over_sqrt_x"]);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    for &x in xs {
        let count = pstar_count(x, g, settings.budget)?;
        let ratio = count as f64 / (x as f64).sqrt();
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        report.push_row(vec![Cell::from(x), Cell::from(count), Cell::from(ratio)]);
    }
    report.summarize("min_ratio", min_ratio);
    report.summarize("max_ratio", max_ratio);
    report.summarize(
        "spread",
        if min_ratio > 0.0 {
            max_ratio / min_ratio
        } else {
            f64::INFINITY
        },
    );
    Ok(report)
}

/// List the members of P*(x).
pub fn run_pstar_list(g: Base, x: Natural, settings: &Settings) -> Result<Report> {
    let values = pstar_list(x, g, settings.budget)?;
    let mut report = Report::new("pstar")
        .config("base", g.get())
        .config("x", x)
        .config("list", true)
        .columns(&["index", "value"]);
    for (i, &v) in values.iter().enumerate() {
        report.push_row(vec![Cell::from(i as u128), Cell::from(v)]);
    }
    report.summarize("count", values.len() as u128);
    Ok(report)
}

/// Pair densities over an increasing scale sequence against the predicted
/// constant. Returns the rows alongside the report for charting.
pub fn run_convergence(
    g: Base,
    scales: &[Natural],
    mode: ConvergenceMode,
    settings: &Settings,
) -> Result<(Report, Vec<ConvergenceRow>)> {
    let rows = convergence_report(g, scales, mode, settings.budget)?;
    let mode_name = match mode {
        ConvergenceMode::FixedLength => "fixed-length",
        ConvergenceMode::PStar => "pstar",
    };
    let mut report = Report::new("convergence")
        .config("base", g.get())
        .config("mode", mode_name)
        .columns(&[
            "scale",
            "count",
            "universe",
            "ratio",
            "predicted",
            "relative_deviation",
        ]);
    for row in &rows {
        report.push_row(vec![
            Cell::from(row.scale),
            Cell::Int(row.count),
            Cell::from(row.universe),
            Cell::from(row.ratio),
            Cell::from(row.predicted),
            Cell::from(row.relative_deviation),
        ]);
    }
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        report.summarize("predicted", first.predicted);
        report.summarize("first_deviation", first.relative_deviation);
        report.summarize("last_deviation", last.relative_deviation);
        report.summarize(
            "deviation_decreased",
            last.relative_deviation < first.relative_deviation,
        );
    }
    Ok((report, rows))
}

/// The exact rationals and floating-point values of every main-term
/// constant for one base.
pub fn run_constants(g: Base) -> Result<Report> {
    let mut report = Report::new("constants")
        .config("base", g.get())
        .columns(&["quantity", "exact", "value"]);
    let rho_v = rho(g);
    let t1r = thm1_rational(g);
    let t2r = thm2_rational(g);
    let t1 = thm1_constant(g);
    let t2 = thm2_constant(g);
    let (euler_exact, euler_limit) = euler_restricted_mobius_sum_limit(g.g3_minus_g() as u128)?;
    let rows: Vec<(&str, String, f64)> = vec![
        ("rho", rational_str(&rho_v), rho_v.to_f64().unwrap()),
        (
            "thm1_rational_part",
            rational_str(&t1r),
            rational_to_f64(&t1r),
        ),
        ("thm1_constant", String::new(), t1),
        (
            "thm2_rational_part",
            rational_str(&t2r),
            rational_to_f64(&t2r),
        ),
        ("thm2_constant", String::new(), t2),
        ("zeta2", "pi^2/6".to_string(), ZETA2),
        (
            "restricted_mobius_limit",
            rational_str(&euler_exact),
            euler_limit,
        ),
    ];
    for (name, exact, value) in rows {
        report.push_row(vec![Cell::from(name), Cell::from(exact), Cell::from(value)]);
    }
    report.summarize("rho", rational_str(&rho_v));
    report.summarize("thm1", t1);
    report.summarize("thm2", t2);
    Ok(report)
}

/// Averaged-discrepancy diagnostic: per-modulus worst class deviations and
/// the weighted total.
pub fn run_bv(g: Base, half_length: u32, max_q: u64, settings: &Settings) -> Result<Report> {
    let terms = bv_discrepancy_terms(max_q, half_length, g, settings.budget)?;
    let mut report = Report::new("bv")
        .config("base", g.get())
        .config("half_length", half_length)
        .config("max_q", max_q)
        .columns(&["q", "max_discrepancy", "term"]);
    let mut total = 0.0f64;
    for &(q, worst, term) in &terms {
        total += term;
        report.push_row(vec![Cell::from(q), Cell::from(worst), Cell::from(term)]);
    }
    report.summarize("total", total);
    report.summarize("moduli", terms.len() as u64);
    Ok(report)
}

/// Farey-point Phi sums: per-modulus reduced-residue sums and the total.
pub fn run_farey(g: Base, half_length: u32, k: i64, max_q: u64) -> Result<Report> {
    let terms = phi_farey_terms(max_q, half_length, k, g)?;
    let mut report = Report::new("farey")
        .config("base", g.get())
        .config("half_length", half_length)
        .config("k", Cell::Int(k as i128))
        .config("max_q", max_q)
        .columns(&["q", "reduced_residues", "phi_sum"]);
    let mut total = 0.0f64;
    for &(q, residues, sum) in &terms {
        total += sum;
        report.push_row(vec![Cell::from(q), Cell::from(residues), Cell::from(sum)]);
    }
    report.summarize("total", total);
    report.summarize("moduli", terms.len() as u64);
    Ok(report)
}

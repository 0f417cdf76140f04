//! Command-line harness for the palindrome census library.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 domain error (bad base,
//! residue, divisor, ...), 3 resource limit (enumeration budget, pair
//! budget, factorization bound). The enumeration budget defaults to
//! 2 * 10^7 walked palindromes; the PALINPRIME_BUDGET environment
//! variable overrides it.

use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use palinprime::coprime::ConvergenceMode;
use palinprime::digits::Base;
use palinprime::experiments::{self, Settings};
use palinprime::report::{convergence_svg, Format, Report};

#[derive(Parser)]
#[command(
    name = "palinprime",
    version,
    about = "Census of base-g palindromes: enumeration, progression counts, \
             exponential sums, and coprime pair densities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: FormatArg,

    /// Write the report to this path instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    #[value(name = "fixed-length")]
    FixedLength,
    Pstar,
}

#[derive(Subcommand)]
enum Command {
    /// List the palindromes of one length with their ranks
    Enumerate {
        #[arg(long)]
        base: u64,
        #[arg(long)]
        length: u32,
    },
    /// Closed-form counts against full enumeration; optionally the
    /// even-length divisibility check
    Census {
        #[arg(long)]
        base: u64,
        /// Include lengths while the palindrome count stays below this cap
        #[arg(long, default_value_t = 1_000_000)]
        count_cap: u64,
        /// Check that even-length palindromes are divisible by g + 1
        #[arg(long)]
        even_divisibility: bool,
    },
    /// Count palindromes in an arithmetic progression
    Ap {
        #[arg(long)]
        base: u64,
        #[arg(long)]
        length: u32,
        #[arg(long)]
        modulus: u128,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        residue: i128,
        /// Refined class k mod g^3 - g
        #[arg(long, allow_hyphen_values = true)]
        class: Option<i128>,
        /// Emit one row per residue of the modulus
        #[arg(long)]
        all_residues: bool,
    },
    /// Audit the progression main term for every divisor of g^3 - g
    #[command(name = "lemma34-audit")]
    Lemma34Audit {
        #[arg(long)]
        base: u64,
        #[arg(long, default_value_t = 1_000_000)]
        count_cap: u64,
    },
    /// Audit the explicit Brun-Titchmarsh majorant over sampled residues
    #[command(name = "bt-audit")]
    BtAudit {
        #[arg(long)]
        base: u64,
        #[arg(long, default_value_t = 9)]
        max_length: u32,
        #[arg(long, default_value_t = 10_000)]
        max_q: u64,
        /// Sampled residues per modulus, in addition to a = 0
        #[arg(long, default_value_t = 64)]
        samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Audit |S(2N+1; alpha)| <= g^2 Phi_N(alpha) over seeded angles
    #[command(name = "lemma33-audit")]
    Lemma33Audit {
        #[arg(long)]
        base: u64,
        #[arg(long, default_value_t = 6)]
        max_half_length: u32,
        #[arg(long, default_value_t = 10_000)]
        samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Möbius-sieve count of ordered coprime palindrome pairs
    #[command(group(
        ArgGroup::new("scale").required(true).args(["half_length", "x"])
    ))]
    Coprime {
        #[arg(long)]
        base: u64,
        /// Fixed length 2N+1 via its half-length N
        #[arg(long)]
        half_length: Option<u32>,
        /// Value bound for the P*(x) census instead of a fixed length
        #[arg(long)]
        x: Option<u128>,
        /// Split divisors at scale^exponent instead of the default
        /// (g^(N/5), or x^(1/10) in P* mode)
        #[arg(long)]
        u_exponent: Option<f64>,
        /// Cross-check against the brute-force pair counter
        #[arg(long)]
        brute: bool,
    },
    /// Census of palindromes up to x coprime to g^3 - g
    Pstar {
        #[arg(long)]
        base: u64,
        /// One or more bounds, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<u128>,
        /// List the members instead of counting (single bound only)
        #[arg(long)]
        list: bool,
    },
    /// Pair densities over a scale sequence against the predicted constant
    Convergence {
        #[arg(long)]
        base: u64,
        /// Half-lengths N (fixed-length mode) or bounds x (pstar mode)
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<u128>,
        #[arg(long, value_enum, default_value = "fixed-length")]
        mode: ModeArg,
        /// Also write an SVG line chart of the relative deviations
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Exact rationals and floats of the main-term constants
    Constants {
        #[arg(long)]
        base: u64,
    },
    /// Averaged-discrepancy diagnostic over moduli coprime to g^3 - g
    Bv {
        #[arg(long)]
        base: u64,
        #[arg(long)]
        half_length: u32,
        #[arg(long, default_value_t = 100)]
        max_q: u64,
    },
    /// Phi sums at Farey points h/q + k/(g^3 - g)
    Farey {
        #[arg(long)]
        base: u64,
        #[arg(long)]
        half_length: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 100)]
        max_q: u64,
    },
}

enum AppError {
    Lib(palinprime::Error),
    Io(std::io::Error),
    Usage(String),
}

impl From<palinprime::Error> for AppError {
    fn from(e: palinprime::Error) -> Self {
        AppError::Lib(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) | AppError::Io(_) => 1,
            AppError::Lib(e) => {
                if e.is_resource_limit() {
                    3
                } else {
                    2
                }
            }
        }
    }

    fn message(&self) -> String {
        match self {
            AppError::Lib(e) => e.to_string(),
            AppError::Io(e) => e.to_string(),
            AppError::Usage(msg) => msg.clone(),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the same path; those are
            // not failures
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message());
            std::process::exit(e.exit_code());
        }
    }
}

fn settings_from_env() -> Result<Settings, AppError> {
    let mut settings = Settings::default();
    if let Ok(raw) = std::env::var("PALINPRIME_BUDGET") {
        let parsed = raw
            .parse::<u64>()
            .map_err(|_| AppError::Usage(format!("invalid PALINPRIME_BUDGET: {raw:?}")))?;
        settings.budget = parsed;
    }
    Ok(settings)
}

fn run(cli: &Cli) -> Result<(), AppError> {
    let settings = settings_from_env()?;
    let report = build_report(&cli.command, &settings)?;
    let rendered = report.render(cli.format.into());
    match &cli.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn build_report(command: &Command, settings: &Settings) -> Result<Report, AppError> {
    let report = match *command {
        Command::Enumerate { base, length } => {
            experiments::run_enumerate(Base::new(base)?, length, settings)?
        }
        Command::Census {
            base,
            count_cap,
            even_divisibility,
        } => {
            let g = Base::new(base)?;
            if even_divisibility {
                experiments::run_even_divisibility(g, count_cap, settings)?
            } else {
                experiments::run_census(g, count_cap, settings)?
            }
        }
        Command::Ap {
            base,
            length,
            modulus,
            residue,
            class,
            all_residues,
        } => experiments::run_ap(
            Base::new(base)?,
            length,
            modulus,
            residue,
            class,
            all_residues,
            settings,
        )?,
        Command::Lemma34Audit { base, count_cap } => {
            experiments::run_lemma34_audit(Base::new(base)?, count_cap, settings)?
        }
        Command::BtAudit {
            base,
            max_length,
            max_q,
            samples,
            seed,
        } => {
            experiments::run_bt_audit(Base::new(base)?, max_length, max_q, samples, seed, settings)?
        }
        Command::Lemma33Audit {
            base,
            max_half_length,
            samples,
            seed,
        } => experiments::run_lemma33_audit(
            Base::new(base)?,
            max_half_length,
            samples,
            seed,
            settings,
        )?,
        Command::Coprime {
            base,
            half_length,
            x,
            u_exponent,
            brute,
        } => {
            let g = Base::new(base)?;
            match (half_length, x) {
                (Some(n), None) => {
                    experiments::run_coprime_fixed(g, n, u_exponent, brute, settings)?
                }
                (None, Some(x)) => {
                    experiments::run_coprime_pstar(g, x, u_exponent, brute, settings)?
                }
                _ => unreachable!("clap enforces exactly one scale"),
            }
        }
        Command::Pstar { base, ref x, list } => {
            let g = Base::new(base)?;
            if list {
                if x.len() != 1 {
                    return Err(AppError::Usage(
                        "--list requires exactly one --x bound".to_string(),
                    ));
                }
                experiments::run_pstar_list(g, x[0], settings)?
            } else {
                experiments::run_pstar(g, x, settings)?
            }
        }
        Command::Convergence {
            base,
            ref scales,
            mode,
            ref svg,
        } => {
            let g = Base::new(base)?;
            let mode = match mode {
                ModeArg::FixedLength => ConvergenceMode::FixedLength,
                ModeArg::Pstar => ConvergenceMode::PStar,
            };
            let (report, rows) = experiments::run_convergence(g, scales, mode, settings)?;
            if let Some(path) = svg {
                let title = format!("relative deviation, base {base}");
                std::fs::write(path, convergence_svg(&rows, &title))?;
            }
            report
        }
        Command::Constants { base } => experiments::run_constants(Base::new(base)?)?,
        Command::Bv {
            base,
            half_length,
            max_q,
        } => experiments::run_bv(Base::new(base)?, half_length, max_q, settings)?,
        Command::Farey {
            base,
            half_length,
            k,
            max_q,
        } => experiments::run_farey(Base::new(base)?, half_length, k, max_q)?,
    };
    Ok(report)
}

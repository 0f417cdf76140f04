//! Exact census of base-g palindromes.
//!
//! The crate revolves around one family of objects: positive integers whose
//! base-g expansion reads the same backwards as forwards. It provides
//!
//! - [`digits`]: base-g digit algebra, palindrome construction and a
//!   rank/unrank bijection over the palindromes of a fixed length,
//! - [`arith`]: gcd, bounded factorization, the Möbius and divisor
//!   functions, and the exact rational constants of the main-term formulas,
//! - [`census`]: exact palindrome counts, counts in arithmetic progressions,
//!   the coprime-filtered set P*(x), divisor profiles and progression
//!   main terms with audited error,
//! - [`coprime`]: the number of ordered relatively prime pairs of
//!   palindromes, by brute-force gcd and by Möbius sieve, with convergence
//!   reports against the predicted leading constants,
//! - [`expsum`]: the exponential-sum layer (psi, Phi, S(N; alpha)) and the
//!   discrepancy diagnostics built on it,
//! - [`report`] and [`experiments`]: the CSV/JSON/SVG report machinery
//!   shared by the CLI and the acceptance suite.
//!
//! All census-style operations are deterministic: the free-digit space is
//! partitioned by the leading free digit and shard results are merged in a
//! fixed order, so outputs do not depend on thread count.

pub mod arith;
pub mod census;
pub mod coprime;
pub mod digits;
pub mod experiments;
pub mod expsum;
pub mod report;

/// Non-negative integer values used throughout the crate.
///
/// Desk-scale budgets (factorization bound 2^63, enumeration budget 2*10^7
/// palindromes) keep every value well below 2^128; arithmetic that could
/// leave that range is checked and reported as [`Error::Overflow`].
pub type Natural = u128;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("base must be an integer >= 2 with g^3 - g <= 2^63, got {0}")]
    InvalidBase(u64),
    #[error("value must be a positive integer")]
    ZeroValue,
    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u64 },
    #[error("most significant digit must be nonzero")]
    LeadingZeroDigit,
    #[error("digit string must be nonempty")]
    EmptyDigits,
    #[error("expected {expected} free digits for length {length}, got {got}")]
    FreeDigitCount {
        expected: u32,
        length: u32,
        got: usize,
    },
    #[error("rank {rank} out of range: only {count} palindromes of length {length}")]
    RankOutOfRange {
        rank: Natural,
        count: Natural,
        length: u32,
    },
    #[error("{value} is not a palindrome of length {length} in base {base}")]
    NotAPalindrome {
        value: Natural,
        length: u32,
        base: u64,
    },
    #[error("length must be positive")]
    ZeroLength,
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{divisor} does not divide g^3 - g = {modulus}")]
    NotADivisor { divisor: u64, modulus: u64 },
    #[error("length must be odd, got {0}")]
    EvenLength(u32),
    #[error("enumeration budget exceeded: {needed} palindromes > budget {budget}")]
    BudgetExceeded { needed: Natural, budget: u64 },
    #[error("pair budget exceeded: {values}^2 pairs > budget {budget}")]
    PairBudgetExceeded { values: usize, budget: u64 },
    #[error("{0} exceeds the factorization bound 2^63")]
    FactorBoundExceeded(Natural),
    #[error("{0} has no prime factor below 10^7 and is not prime; factorization out of range")]
    FactorizationOutOfRange(u64),
    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),
}

impl Error {
    /// True for errors caused by resource limits (budgets, bounds) rather
    /// than invalid input. The CLI maps these to a distinct exit code.
    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. }
                | Error::PairBudgetExceeded { .. }
                | Error::FactorBoundExceeded(_)
                | Error::FactorizationOutOfRange(_)
                | Error::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

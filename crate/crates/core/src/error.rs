use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound 2^63")]
    PrimeTooLarge(u64),
    #[error("precision must be at least 1 digit")]
    ZeroPrecision,
    #[error("operands disagree: p={left_prime} N={left_precision} vs p={right_prime} N={right_precision}")]
    Mismatch {
        left_prime: u64,
        left_precision: usize,
        right_prime: u64,
        right_precision: usize,
    },
    #[error("digit {digit} at position {position} is out of range for p={prime}")]
    DigitOutOfRange {
        digit: u64,
        position: usize,
        prime: u64,
    },
    #[error("compact rendering needs p <= 36, got p={0}")]
    CompactUnsupported(u64),
    #[error("denominator {den} is divisible by p={prime}; not a p-adic integer")]
    NotIntegral { den: String, prime: u64 },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("period must contain at least one digit")]
    EmptyPeriod,
    #[error("insufficient {what}: got {got}, need at least {minimum}")]
    Insufficient {
        what: &'static str,
        got: u64,
        minimum: u64,
    },
    #[error("{what} too large: got {got}, at most {maximum}")]
    TooLarge {
        what: &'static str,
        got: u64,
        maximum: u64,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

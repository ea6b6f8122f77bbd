use alloc::string::String;
use core::fmt;

/// Every failure the library can report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    Parse(String),
    DivisionByZeroInterval,
    /// Argument outside the domain of a function (log of a non-positive
    /// interval, weight evaluated at or below `s0`, ...).
    Domain(String),
    InvalidDigit(u64),
    BranchStraddle,
    NonPositiveDelta(u64),
    NoContraction,
    InsufficientDigits { needed: u64, available: u64 },
    DivergentHead,
    UpperBoundUnavailable,
    DigitBoundViolated { position: u64, digit: u64, bound: u64 },
    Unsupported(String),
    MissingConstant(&'static str),
    OracleNotMonotone { index: u64 },
    OracleExhausted { index: u64 },
    SearchBudgetExceeded(String),
    InfimumViolated,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(s) => write!(f, "parse error: {s}"),
            Error::DivisionByZeroInterval => write!(f, "division by an interval containing zero"),
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::InvalidDigit(d) => write!(f, "digit {d} indexes no branch"),
            Error::BranchStraddle => write!(f, "interval meets more than one branch"),
            Error::NonPositiveDelta(n) => write!(f, "delta_G({n}) not certified positive"),
            Error::NoContraction => write!(f, "fixed point enclosure failed self-inclusion"),
            Error::InsufficientDigits { needed, available } => {
                write!(f, "need {needed} digits, stream supplied {available}")
            }
            Error::DivergentHead => write!(f, "head term exceeds the overflow budget"),
            Error::UpperBoundUnavailable => write!(f, "upper bound requires a digit bound"),
            Error::DigitBoundViolated { position, digit, bound } => {
                write!(f, "digit {digit} at position {position} exceeds bound {bound}")
            }
            Error::Unsupported(s) => write!(f, "unsupported: {s}"),
            Error::MissingConstant(c) => write!(f, "map constant {c} not declared"),
            Error::OracleNotMonotone { index } => write!(f, "oracle decreased at index {index}"),
            Error::OracleExhausted { index } => write!(f, "oracle ended at index {index}"),
            Error::SearchBudgetExceeded(s) => write!(f, "search budget exceeded: {s}"),
            Error::InfimumViolated => write!(f, "target not certified above the infimum plus 2 epsilon"),
        }
    }
}

impl core::error::Error for Error {}

//! Error type shared by every module of the crate.

use std::fmt;

/// All failure modes of the crate.
#[derive(Debug)]
pub enum Error {
    /// A required set was empty; the payload names it.
    EmptySet(&'static str),
    /// A subtraction amount outside 1..,
    InvalidSubtraction(u64),
    /// A divisor outside 2..
    InvalidDivisor(u64),
    /// A position beyond the covered or supported range.
    OutOfRange {
        n: u64,
        max: u64,
    },
    /// A value would exceed the supported position range.
    Overflow,
    /// A computation would exceed the configured memory budget.
    ResourceLimit {
        needed: u64,
        budget: u64,
    },
    /// A persisted table failed structural or self-consistency checks.
    CorruptFile(String),
    /// Two game specifications were required to agree and did not.
    SpecMismatch(String),
    /// A documented precondition of an operation does not hold.
    PreconditionViolated(String),
    Io(std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptySet(which) => write!(f, "set {which} must be nonempty"),
            Error::InvalidSubtraction(s) => {
                write!(f, "subtraction amounts must be at least 1, got {s}")
            }
            Error::InvalidDivisor(d) => write!(f, "divisors must be at least 2, got {d}"),
            Error::OutOfRange { n, max } => {
                write!(f, "position {n} outside covered range 0..={max}")
            }
            Error::Overflow => write!(f, "value exceeds the supported position range (2^62)"),
            Error::ResourceLimit { needed, budget } => {
                write!(f, "{needed} bytes needed but the memory budget is {budget}")
            }
            Error::CorruptFile(what) => write!(f, "corrupt table file: {what}"),
            Error::SpecMismatch(what) => write!(f, "game specification mismatch: {what}"),
            Error::PreconditionViolated(what) => write!(f, "precondition violated: {what}"),
            Error::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

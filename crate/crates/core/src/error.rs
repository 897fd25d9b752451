use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rank-one factor is the zero vector")]
    ZeroFactor,
    #[error("scaling by zero is not allowed")]
    ZeroScalar,
    #[error("contraction degree {dual} exceeds form degree {form}")]
    DegreeMismatch { dual: usize, form: usize },
    #[error("expected n <= m, got m = {m}, n = {n}")]
    OrderViolation { m: usize, n: usize },
    #[error("modulus {0} is not a prime below 2^62")]
    NotPrime(u64),
    #[error("entry denominator is divisible by the prime {0}")]
    BadPrime(u64),
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("matrix has non-integer entries")]
    NonIntegerEntries,
    #[error("duplicate entry at {0:?}")]
    DuplicateEntry(Vec<usize>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the arithmetic itself (as opposed to bad input shapes).
    pub fn is_arithmetic(&self) -> bool {
        matches!(self, Error::DivisionByZero | Error::NotPrime(_) | Error::BadPrime(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

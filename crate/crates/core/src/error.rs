use thiserror::Error;

/// Errors raised while planning or executing dealiased transforms and convolutions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("residue index {index} out of range for {count} residue blocks")]
    ResidueOutOfRange { index: usize, count: usize },

    #[error("kernel {kernel} does not apply: {reason}")]
    WrongRegime { kernel: &'static str, reason: String },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("multiplication operator arity mismatch: {0}")]
    Arity(String),

    #[error("input is not Hermitian symmetric: {0}")]
    NotHermitian(String),

    #[error("unsupported transform request: {0}")]
    Unsupported(String),

    #[error("oracle guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("tuning cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum HodnError {
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),
    #[error("zero modulus")]
    ZeroModulus,
    #[error("invalid polynomial: {0}")]
    InvalidPoly(String),
    #[error("reducible modulus: {0}")]
    ReducibleModulus(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed input file: {0}")]
    MalformedFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HodnError>;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point outside computational domain: {0}")]
    OutsideDomain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max deviation {dev:e}, scale {scale:e})")]
    NotHermitian { dev: f64, scale: f64 },
    #[error("eigensolver failed: {0}")]
    EigenFailure(String),
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("nonfinite value encountered in {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

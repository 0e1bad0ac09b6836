use thiserror::Error;

/// Errors raised by the analysis kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation requires a non-empty domain")]
    EmptyDomain,
    #[error("result has an empty domain (not a proper function)")]
    ImproperResult,
    #[error("function has no affine minorant")]
    NoMinorant,
    #[error("envelope is improper (identically +inf or takes -inf)")]
    ImproperEnvelope,
    #[error("point {0} is outside the domain")]
    OutOfDomain(f64),
    #[error("polynomial degree {0} exceeds the supported maximum of 4")]
    DegreeTooHigh(usize),
    #[error("invalid piece layout: {0}")]
    InvalidPieces(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),
    #[error("resolution too coarse: {0}")]
    TooCoarse(String),
    #[error("node cap exceeded: {got} interior nodes > cap {cap}")]
    NodeCapExceeded { got: usize, cap: usize },
    #[error("mask file: {0}")]
    MaskFile(String),
    #[error("empty region: {0}")]
    EmptyRegion(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigensolve: {0}")]
    Eigensolve(String),
    #[error("operation needs a full decomposition, have {have} of {need} modes")]
    PartialDecomposition { have: usize, need: usize },
    #[error("zero test vector")]
    ZeroVector,
    #[error("exponent fit: {0}")]
    Fit(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex count must be even and at least 2, got {0}")]
    OddVertexCount(usize),

    #[error("vertex count mismatch: expected {expected}, got {got}")]
    VertexCountMismatch { expected: usize, got: usize },

    #[error("not a perfect directed matching: {0}")]
    NotPerfectMatching(String),

    #[error("invalid flow network: {0}")]
    InvalidNetwork(String),

    #[error("invalid rational: {0}")]
    InvalidRational(String),

    #[error("invalid game parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle instance too large: n = {n}, cap = {cap}")]
    OracleTooLarge { n: usize, cap: usize },

    /// An internal invariant failed. Any occurrence is a solver bug, never
    /// a property of the input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

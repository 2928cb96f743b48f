use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (expected 2, 4 or 8)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("linear program is infeasible (phase-one optimum {0:e})")]
    Infeasible(f64),

    #[error("linear program is unbounded")]
    Unbounded,
}

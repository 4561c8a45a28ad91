use thiserror::Error;

/// Errors raised by the numerical layers and by input parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("SVD did not converge after {sweeps} sweeps")]
    FactorizationFailure { sweeps: usize },

    #[error(
        "matrix is rank deficient (sigma_min / sigma_max = {ratio:e}); \
         the least-squares solution is not unique, so its perturbation theory \
         requires full column rank"
    )]
    RankDeficient { ratio: f64 },

    #[error("perturbed matrix is rank deficient (sigma_min / sigma_max = {ratio:e})")]
    PerturbedRankDeficient { ratio: f64 },

    #[error("right-hand side b is the zero vector")]
    ZeroRhs,

    #[error("least-squares solution is zero; norms relative to x are undefined")]
    ZeroSolution,

    #[error("degenerate rank-2 input: {0}")]
    Degenerate(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: malformed files, wrong shapes, rank-deficient data, bad flags.
    Validation,
    /// The computation itself failed.
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::FactorizationFailure { .. } | Error::PerturbedRankDeficient { .. } => {
                ErrorClass::Numerical
            }
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

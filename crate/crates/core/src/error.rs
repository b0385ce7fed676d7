//! Error type shared across the toolkit.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A size/budget guard tripped (exhaustive scans, memory limits, enumeration).
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Eigensolver exhausted its matvec budget; carries the best residuals seen.
    #[error("eigensolver failed to converge after {iterations} matvecs (worst residual {worst:.3e})")]
    ConvergenceFailure {
        iterations: usize,
        worst: f64,
        residuals: Vec<f64>,
    },

    /// Gap below the degeneracy tolerance; the adiabatic ratio is undefined.
    #[error("gap {gap:.3e} is below the degeneracy tolerance; ratio undefined")]
    DegenerateGap { gap: f64 },

    #[error("no interior extremum in the sweep table")]
    NoInteriorExtremum,

    #[error("underdetermined fit: {points} usable points")]
    UnderdeterminedFit { points: usize },

    /// Non-positive value fed to a log-space fit.
    #[error("log-domain error for size {size}: gap value {value:.3e}")]
    LogDomain { size: usize, value: f64 },

    #[error("numerical validity violated: {0}")]
    NumericalValidity(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::BudgetExceeded(msg.into())
    }
}

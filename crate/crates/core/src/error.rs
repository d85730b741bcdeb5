use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by model construction, the numerical routines and file IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("recovery rate not positive at atom {index} (gamma = {value})")]
    NonPositiveRecovery { index: usize, value: f64 },

    #[error("negative transmission rate at ({row}, {col}) (value = {value})")]
    NegativeRate { row: usize, col: usize, value: f64 },

    #[error("negative weight at atom {index} (value = {value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("graphon is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("state leaves the unit box at atom {index} (value = {value})")]
    OutsideUnitBox { index: usize, value: f64 },

    #[error("step size too large: state overshoots the unit box by {overshoot:e} at t = {time}")]
    StepTooLarge { time: f64, overshoot: f64 },

    #[error("not supercritical at level epsilon = {epsilon} (effective R0 = {r0_effective})")]
    NotSupercritical { epsilon: f64, r0_effective: f64 },

    #[error("spectral radius is zero; no Perron vector")]
    ZeroRadius,

    #[error("operation requires a graphon-form kernel")]
    NotGraphonForm,

    #[error("constant C is undefined: beta*theta vanishes at positive-mass atom {index}")]
    UndefinedConstant { index: usize },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid vaccination policy: {0}")]
    InvalidPolicy(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad input (as opposed to numerical failure).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NotConverged { .. } | Error::StepTooLarge { .. } | Error::ZeroRadius
        )
    }
}

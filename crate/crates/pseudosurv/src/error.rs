//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by estimators, model fitting, simulation, and file IO.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data failed validation (bad shapes, non-finite values, bad rows).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An estimator could not be computed from the given data.
    #[error("estimation failed: {0}")]
    Estimation(String),

    /// A numeric computation produced a non-finite value.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Model fitting failed.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Simulation setup or generation failed.
    #[error("simulation failed: {0}")]
    Simulation(String),

    /// File or schema problem while reading/writing artifacts.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// CSV parse or write problem.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// JSON parse or write problem.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for an `InvalidInput` error.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

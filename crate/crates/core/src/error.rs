use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the model, series and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: String,
    },

    #[error("entrance condition violated: {0}")]
    Entrance(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge after {terms} terms (partial value {partial:e})")]
    NonConvergence { partial: f64, terms: usize },

    #[error("range error: {0}")]
    Range(String),

    #[error("imaginary residue {im:e} exceeds tolerance for real part {re:e}")]
    ImaginaryResidue { re: f64, im: f64 },

    #[error("degenerate query: {0}")]
    Degenerate(String),

    #[error("{path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error("comparison hypothesis held but ordering failed: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, expected: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            value,
            expected: expected.into(),
        }
    }

    /// True for failures of the numerical layer (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Range(_)
                | Error::ImaginaryResidue { .. }
                | Error::Inconsistent(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

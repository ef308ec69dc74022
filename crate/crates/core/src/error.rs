use thiserror::Error;

use crate::integrator::IntegrationError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A caller broke an operation's precondition (e.g. asked for the
    /// gradient of a block that only exposes a proximal map).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("saddle-point oracle failed: {0}")]
    Oracle(String),

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Integration(#[from] Box<IntegrationError>),
}

pub(crate) fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { what, expected, got })
    }
}

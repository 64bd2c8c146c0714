//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library. Every variant carries enough context to
/// be turned into a failure record by a driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("site {site} carries an infinite value; split the operator into chains first")]
    MustSplit { site: usize },

    #[error("spectral parameter {lambda} lies within {distance:e} of a truncation pole")]
    PoleProximity { lambda: f64, distance: f64 },

    #[error("{0} did not converge")]
    NotConverged(String),

    #[error("phase step could not be resolved below pi/2: {0}")]
    UnresolvedPhase(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("fixture does not satisfy the hypothesis: {0}")]
    Fixture(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

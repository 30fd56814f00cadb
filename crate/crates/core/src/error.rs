use thiserror::Error;

/// Errors raised across the crate.
///
/// Budget exhaustion is kept apart from mathematical failures so callers can
/// retry with larger limits.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("walk is not closed")]
    NotClosed,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("inapplicable move: {0}")]
    InapplicableMove(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("enumeration bound exceeded: {0}")]
    Bound(String),
    #[error("sampler calibration failure: {0}")]
    Calibration(String),
    #[error("trajectory does not end at the null sequence")]
    NonVanishing,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

use thiserror::Error;

/// Errors raised by model construction, enumeration and the probes built on
/// top of them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("elements belong to different group models")]
    ModelMismatch,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("enumeration budget of {limit} elements exceeded")]
    Budget { limit: u64 },
    #[error("materialized radius {have} is below the required {need}")]
    InsufficientRadius { have: usize, need: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid window: {0}")]
    Window(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

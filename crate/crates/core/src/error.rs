use alloc::string::String;

/// Errors raised by the optimization core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("objective index {index} out of range for {m} objectives")]
    ObjectiveIndex { index: usize, m: usize },
    #[error("decision vector outside the problem domain: {0}")]
    Domain(String),
    #[error("invalid problem parameters: {0}")]
    Parameter(String),
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("invalid ranking: {0}")]
    Ranking(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

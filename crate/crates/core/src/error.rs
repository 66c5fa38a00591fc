use thiserror::Error;

/// Errors raised by the solver and its building blocks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{value} is not a unit modulo {p}")]
    NotAUnit { value: u128, p: u64 },

    #[error("theta is infinite at precision {precision}: {detail}")]
    InfiniteTheta { precision: u32, detail: String },

    #[error("precision underflow: {0}")]
    PrecisionUnderflow(String),

    #[error("insufficient variables: {0}")]
    InsufficientVariables(String),

    #[error("no witness found below the guaranteed threshold ({len} < {threshold})")]
    BelowThreshold { len: usize, threshold: usize },

    #[error("counterexample found: {0}")]
    Counterexample(String),

    #[error("guaranteed-mode pipeline failure at {stage}: {detail}")]
    PipelineFailure { stage: String, detail: String },

    #[error("no solution exists at precision {0}")]
    Unsolvable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

use thiserror::Error;

/// Errors surfaced by exact and truncated arithmetic and by the checkers.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("precision exhausted: needed valuation information beyond {available} q-adic digits")]
    PrecisionExhausted { available: i64 },

    #[error("not invertible: function vanishes at residue(s) {zeros:?}")]
    NotInvertible { zeros: Vec<u64> },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("precondition unverified: {0}")]
    PreconditionUnverified(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("conductor {requested} exceeds session maximum {max}")]
    ConductorTooLarge { requested: u32, max: u32 },

    #[error("no q-adic embedding attached to the exact backend")]
    NoEmbedding,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Library error type. Display strings start with a stable `E-*` code so
/// callers (and shell pipelines) can match on them without parsing prose.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("E-INPUT: {0}")]
    InvalidInput(String),

    #[error("E-SIGMA: {0}")]
    InvalidSigma(String),

    #[error("E-STEP: step {k} out of range for a path with {len} steps")]
    StepOutOfRange { k: usize, len: usize },

    #[error("E-INDEX: difference index {j} out of range 1..={max}")]
    IndexOutOfRange { j: usize, max: usize },

    #[error("E-ACTIVE: {0}")]
    InvalidActiveSet(String),

    #[error("E-DIRECTION: degenerate direction at index {j}: |denominator| = {denom:.3e}")]
    DegenerateDirection { j: usize, denom: f64 },

    #[error("E-GRAM: active design is numerically singular: {0}")]
    SingularDesign(String),

    #[error("E-CAP: {0}")]
    CapExceeded(String),

    #[error("E-TIE: near-tie at lambda = {lambda:.6e} between difference indices {indices:?}")]
    TieDetected { lambda: f64, indices: Vec<usize> },

    #[error("E-ROOT: {0}")]
    RootFinding(String),

    #[error("E-KKT: {0}")]
    KktViolation(String),

    #[error("E-INTERNAL: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

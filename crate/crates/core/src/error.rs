use thiserror::Error;

/// Errors raised while building or evaluating JPTA and HBF designs.
#[derive(Debug, Error)]
pub enum JptaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("angle {value} rad for `{field}` is outside [-pi/2, pi/2]")]
    AngleOutOfRange { field: &'static str, value: f64 },

    #[error("subcarrier index {0} is not in the grid")]
    SubcarrierOutOfRange(i64),

    #[error("dimension mismatch: {what} (expected {expected}, got {actual})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid beam target: {0}")]
    InvalidTarget(String),

    #[error("target power {total} exceeds budget {budget}")]
    PowerBudgetExceeded { total: f64, budget: f64 },

    #[error("degenerate target: {0}")]
    DegenerateTarget(String),

    #[error("invalid design options: {0}")]
    InvalidOptions(String),

    #[error("beam {index} is not unit norm (norm {norm})")]
    NotUnitNorm { index: usize, norm: f64 },

    #[error("empty angle grid")]
    EmptyAngleGrid,

    #[error("invalid band plan: {0}")]
    InvalidBands(String),

    #[error("invalid RF chain count: {0}")]
    InvalidRfChains(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, JptaError>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("too large for exact {what}: needs {needed} steps, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("layout violation: {0}")]
    Layout(String),

    #[error("nearest codeword is not unique (distance {distance})")]
    NonUniqueDecoding { distance: String },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for the budget family of errors, which the CLI maps to its own exit code.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

/// Returns `BudgetExceeded` unless `needed <= budget`.
pub(crate) fn check_budget(what: &'static str, needed: u128, budget: u64) -> Result<()> {
    if needed > budget as u128 {
        Err(Error::BudgetExceeded { what, needed, budget })
    } else {
        Ok(())
    }
}

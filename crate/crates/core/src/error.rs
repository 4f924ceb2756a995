use alloc::string::String;

/// Errors raised by the solver core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("entry ({row}, {col}) out of range for dimension {n}")]
    IndexOutOfRange { row: usize, col: usize, n: usize },
    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("step rejected: {0}")]
    StepRejected(&'static str),
    #[error("eigensolver did not converge after {restarts} restarts (best residual {residual:e})")]
    EigenNotConverged { restarts: usize, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

/// Errors produced by the certificate, winnowing, and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain mismatch: expected n={expected}, found n={found}")]
    DomainMismatch { expected: u32, found: u32 },

    #[error("function is not a member of the class")]
    NotAMember,

    #[error("{what} budget exceeded: {count} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        count: u64,
        limit: u64,
    },

    #[error("postcondition violated in {operation}: {detail}")]
    PostconditionViolated {
        operation: &'static str,
        detail: String,
    },

    #[error("retries exhausted in stage `{stage}` after {attempts} attempts")]
    RetriesExhausted { stage: &'static str, attempts: usize },

    #[error("solver defect: {0}")]
    SolverDefect(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

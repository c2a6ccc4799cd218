//! Crate-wide error type.  Variants are grouped by how the command-line
//! driver maps them onto exit codes: input problems (parse/type/linearity),
//! semantic failures (rule violations), and internal invariant breaches.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("linearity violation: {0}")]
    Linearity(String),

    #[error("rule violation: {0}")]
    Rule(String),

    #[error("derivation node {path}: {msg}")]
    Script { path: String, msg: String },

    #[error("model error: {0}")]
    Model(String),

    #[error("symbolic only: {0}")]
    Symbolic(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("internal invariant breach: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line, col, msg: msg.into() }
    }

    /// True for errors that mean the input itself was unusable, as opposed
    /// to a well-formed input that fails a semantic check.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Type(_) | Error::Linearity(_) | Error::Symbolic(_)
        )
    }

    /// True for breaches of internal invariants (never expected on any
    /// input; indicates a kernel bug or an exhausted resource cap).
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_) | Error::CapExceeded(_))
    }
}

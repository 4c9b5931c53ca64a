//! Error type shared by every module of the toolkit.

use thiserror::Error;

/// Errors raised by parsing, evaluation, normalization and model construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Concrete syntax did not match the grammar.
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// An identifier that is not a member of the declared alphabet.
    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    /// An inequality diamond appeared where only the equality fragment is allowed.
    #[error("inequality diamonds (`!=`) are not allowed in the equality-only fragment")]
    FragmentViolation,

    /// A node id that does not exist in the tree at hand.
    #[error("unknown node id {0}")]
    UnknownNode(usize),

    /// An enumeration or level bound was exceeded; nothing was silently truncated.
    #[error("budget exceeded while {what}: needed {needed}, limit {limit}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        limit: u128,
    },

    /// Scheme instantiation failed (missing binding, sort mismatch, equal labels, ...).
    #[error("instantiation error: {0}")]
    Instantiation(String),

    /// A normal-form candidate has no model (the construction's verification failed).
    #[error("not consistent: {0}")]
    NotConsistent(String),

    /// A level mismatch between normal-form objects.
    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: usize, found: usize },

    /// An invariant that should hold by construction was violated.
    #[error("internal fault: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    /// Whether this error signals an exhausted budget or level cap.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

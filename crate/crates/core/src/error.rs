use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::analyzer::Diagnostic;
use crate::dsl::SourceDiagnostic;

/// One violation found by [`crate::grammar::build_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub class: String,
    pub message: String,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "class {}: {}", self.class, self.message)
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid system: {}", join(.0))]
    Validation(Vec<ValidationIssue>),

    #[error("parse error: {}", join(.0))]
    Parse(Vec<SourceDiagnostic>),

    #[error("specification rejected: {}", join(.0))]
    Analysis(Vec<Diagnostic>),

    #[error("unknown class {0}")]
    UnknownClass(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("structure is not a member of class {class}: {reason}")]
    Membership { class: String, reason: String },

    #[error("rank {rank} out of range: class has {count} structures of size {size}")]
    Range {
        rank: BigUint,
        count: BigUint,
        size: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("class has no structure of size {0}")]
    Empty(usize),

    #[error("insufficient terms: need at least {needed}, got {got}")]
    InsufficientTerms { needed: usize, got: usize },

    #[error("count tables exceed the memory cap of {limit_mb} MB")]
    TableLimit { limit_mb: usize },

    #[error("tables are prepared up to size {prepared}, size {requested} requested")]
    NotPrepared { requested: usize, prepared: usize },

    #[error("tables are sealed at size {0}")]
    Sealed(usize),

    #[error("invalid structure text: {0}")]
    Term(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

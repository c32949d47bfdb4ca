//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced while loading artifacts, parsing inputs, or evaluating.
#[derive(Debug, Error)]
pub enum CareError {
    /// A line of an input file (pattern DSL, TSV, JSONL, review file) could
    /// not be parsed. `file` is a display name, not necessarily a real path.
    #[error("parse error at {file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },

    /// Semantically invalid input: unknown class names, violated invariants,
    /// bad configuration values.
    #[error("validation error: {0}")]
    Validation(String),

    /// Underlying filesystem failure.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Fleiss' kappa is undefined when expected agreement is exactly 1
    /// (every rater used the same category on every item).
    #[error("fleiss' kappa degenerate for {context}: expected agreement is 1")]
    DegenerateKappa { context: String },
}

impl CareError {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CareError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        CareError::Parse {
            file: file.into(),
            line,
            msg: msg.into(),
        }
    }

    /// True for errors callers should treat as bad input rather than a
    /// failed environment (exit code 1 vs 2 in the CLI).
    pub fn is_validation(&self) -> bool {
        !matches!(self, CareError::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, CareError>;

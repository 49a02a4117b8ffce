//! Command-line harness: experiment configuration (flags over a flat
//! key-value file), orchestration of the library operations, and
//! deterministic CSV emission.
//!
//! Exit-code discipline: 0 on success, 2 for anything wrong with the
//! experiment description (unparseable flags, unknown config keys, domain
//! constructors rejecting a value), 3 for failures while running it
//! (divergent solves, exceeded budgets, unwritable output).

pub mod commands;
pub mod config;
pub mod csv;

use std::fmt;

/// What went wrong, split by who has to fix it: the experiment description
/// (exit 2) or the run itself (exit 3).
#[derive(Debug)]
pub enum CliError {
    /// The experiment description is invalid; nothing was computed and no
    /// output file is written.
    Validation(String),
    /// A library operation failed mid-run.
    Numerical {
        operation: String,
        inputs: String,
        source: pathkernel::error::Error,
    },
    /// The output could not be written.
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical { .. } | CliError::Io { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "invalid experiment: {msg}"),
            CliError::Numerical {
                operation,
                inputs,
                source,
            } => write!(f, "{operation} failed for {inputs}: {source}"),
            CliError::Io { path, source } => write!(f, "cannot write {path}: {source}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Domain-type construction from user input is a description problem.
pub(crate) fn validation(err: pathkernel::error::Error) -> CliError {
    CliError::Validation(err.to_string())
}

/// The same error class arising while the experiment runs is a run problem.
pub(crate) fn numerical(
    operation: &str,
    inputs: impl fmt::Display,
    source: pathkernel::error::Error,
) -> CliError {
    CliError::Numerical {
        operation: operation.to_string(),
        inputs: inputs.to_string(),
        source,
    }
}

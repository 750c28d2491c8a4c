//! Command-line front end of the `radii` engine: continuation runs, single
//! point proofs, certificate verification, diagrams, coexistence counts and
//! estimate tables.
//!
//! Exit codes: `0` success, `1` a rigorous check failed, `2` bad usage or
//! input, `3` a numerical failure (Newton, SVD).

// `!(x < y)` is how NaN-safe comparisons are spelled throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod certfile;
pub mod commands;
pub mod config;
pub mod hexfloat;
pub mod svg;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("corrupt file {}: {reason}", path.display())]
    Corrupt { path: PathBuf, reason: String },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// A malformed file whose path is filled in by the caller.
    pub fn corrupt(reason: impl Into<String>) -> Self {
        CliError::Corrupt {
            path: PathBuf::new(),
            reason: reason.into(),
        }
    }

    /// Fills in the path of a [`CliError::Corrupt`] raised without one.
    pub fn at(self, file: &Path) -> Self {
        match self {
            CliError::Corrupt { path, reason } if path.as_os_str().is_empty() => CliError::Corrupt {
                path: file.to_path_buf(),
                reason,
            },
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Corrupt { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

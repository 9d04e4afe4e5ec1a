//! Front end for hyperlab experiments: configs, commands, canned reproductions
//! and versioned JSON reports.

pub mod commands;
pub mod config;
pub mod repro;
pub mod report;

use thiserror::Error;

pub use config::{CommandKind, ExperimentConfig};
pub use report::{write_atomic, Report, SCHEMA};

/// Exit status for a successful run or a matching verdict.
pub const EXIT_OK: i32 = 0;
/// `--expect` was given and the verdict differs, or a reproduction check failed.
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
/// A mathematical precondition was violated (non-commuting generators, rational θ, …).
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] hyperlab_core::Error),
    #[error("unknown reproduction id {0:?}")]
    UnknownId(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hyperlab_core::Error as E;
        match self {
            CliError::Core(
                E::NotCommuting { .. }
                | E::NotCoprime { .. }
                | E::RationalTheta
                | E::NumericalBreakdown(_)
                | E::Overflow
                | E::SearchBoundExceeded(_)
                | E::NoNontrivialCanonical(_)
                | E::IncompatibleGrids,
            ) => EXIT_PRECONDITION,
            _ => EXIT_CONFIG,
        }
    }
}

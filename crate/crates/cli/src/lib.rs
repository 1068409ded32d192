//! Batch driver for difficulty scoring and difficulty-aware evaluation.
//!
//! Each `cmd_*` function backs one subcommand of the `sr-difficulty` binary
//! and is usable directly from tests.

use std::fmt;

pub mod commands;
pub mod config;
pub mod manifest;
pub mod schema;

pub use commands::{cmd_artifact_map, cmd_compare, cmd_eval, cmd_score, DifficultySource};
pub use config::RunConfig;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    /// Unpaired or undecodable inputs beyond the tolerated fraction.
    Data = 2,
    /// An internal invariant check failed.
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub struct CommandError {
    pub status: ExitStatus,
    #[source]
    pub source: anyhow::Error,
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl CommandError {
    pub fn usage(e: impl Into<anyhow::Error>) -> Self {
        Self { status: ExitStatus::Usage, source: e.into() }
    }

    pub fn data(e: impl Into<anyhow::Error>) -> Self {
        Self { status: ExitStatus::Data, source: e.into() }
    }

    pub fn internal(e: impl Into<anyhow::Error>) -> Self {
        Self { status: ExitStatus::Internal, source: e.into() }
    }
}

pub type CommandResult = Result<ExitStatus, CommandError>;

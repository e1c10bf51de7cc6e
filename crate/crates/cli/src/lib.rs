//! Command-line layer over [`dicke_core`]: configuration files, CSV/manifest
//! serialization, the four subcommands of the `dicke-battery` binary, and
//! the verification suite behind `dicke-battery check`.
//!
//! The split from the binary keeps every piece unit-testable and lets the
//! acceptance tests drive the exact code paths the CLI ships.

use std::path::PathBuf;

use thiserror::Error;

pub mod check;
pub mod commands;
pub mod config;
pub mod output;

/// Any failure surfaced to the command line.
///
/// The variant decides the process exit code: `1` for failed verification
/// checks, `2` for configuration/domain problems (including I/O on paths the
/// user chose), `3` for internal numerical failures.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flags, config-file contents, or parameter domain.
    #[error("{0}")]
    Config(String),

    /// Failure propagated from the simulation core.
    #[error(transparent)]
    Core(#[from] dicke_core::Error),

    /// Filesystem problem on an input or output path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// One or more verification checks failed.
    #[error("{} of the verification checks failed: {}", failed.len(), failed.join(", "))]
    ChecksFailed { failed: Vec<String> },
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed { .. } => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                dicke_core::Error::EigSolverFailure { .. }
                | dicke_core::Error::NonPositiveDensity { .. }
                | dicke_core::Error::NotNormalized { .. } => 3,
                _ => 2,
            },
        }
    }

    /// Short stable tag for the one-line `error[<tag>]: …` stderr cause.
    pub fn tag(&self) -> &'static str {
        match self {
            CliError::ChecksFailed { .. } => "check",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Core(e) => match e {
                dicke_core::Error::Truncation { .. } => "truncation",
                dicke_core::Error::DimensionMismatch { .. } => "dimension-mismatch",
                dicke_core::Error::EigSolverFailure { .. } => "eigensolver",
                dicke_core::Error::NonPositiveDensity { .. } => "density",
                dicke_core::Error::NotNormalized { .. } => "normalization",
                dicke_core::Error::InvalidThreshold { .. } => "threshold",
                dicke_core::Error::Config(_) => "config",
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_partition_the_failure_modes() {
        let config = CliError::Config("bad".into());
        assert_eq!(config.exit_code(), 2);
        assert_eq!(config.tag(), "config");

        let domain = CliError::Core(dicke_core::Error::Config("bad".into()));
        assert_eq!(domain.exit_code(), 2);
        assert_eq!(domain.tag(), "config");

        let truncation = CliError::Core(dicke_core::Error::Truncation {
            n_bar: 20.0,
            n_fock: 40,
            tail: 5e-5,
            tol: 1e-8,
        });
        assert_eq!(truncation.exit_code(), 2);
        assert_eq!(truncation.tag(), "truncation");

        let numerical = CliError::Core(dicke_core::Error::EigSolverFailure { dim: 240 });
        assert_eq!(numerical.exit_code(), 3);
        assert_eq!(numerical.tag(), "eigensolver");

        let failed = CliError::ChecksFailed {
            failed: vec!["qsl-violation".into()],
        };
        assert_eq!(failed.exit_code(), 1);
        assert_eq!(failed.tag(), "check");
        assert!(failed.to_string().contains("qsl-violation"));
    }
}

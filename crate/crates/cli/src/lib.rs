//! Scenario runner behind the `rsf` binary: Casimir runs and sweeps, generator extraction,
//! amplifier cross-checks and Fock-oracle checks.

pub mod casimir_run;
pub mod checks;
pub mod config;

use std::fmt;

pub use casimir_run::{run_casimir, run_extract, run_sweep, RunReport, SweepReport};
pub use checks::{run_amplify, run_fock_check, FockCase};
pub use config::{AmplifyConfig, ScenarioConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed or physically invalid configuration.
    Config(String),
    /// A checked invariant failed.
    Invariant(String),
    Physics(rsf_core::Error),
    Io(String),
}

impl CliError {
    /// 1 for invariant and physics failures, 2 for configuration and I/O problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Invariant(_) | Self::Physics(_) => 1,
            Self::Config(_) | Self::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "config invalid: {m}"),
            Self::Invariant(m) => write!(f, "invariant violated: {m}"),
            Self::Physics(e) => write!(f, "{e}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<rsf_core::Error> for CliError {
    fn from(e: rsf_core::Error) -> Self {
        Self::Physics(e)
    }
}

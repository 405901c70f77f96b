//! Experiment runner around the `preisach` library: configuration loading,
//! the subcommands, and their CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{
    cmd_bounds, cmd_control, cmd_oracle_check, cmd_simulate, cmd_sweep, BoundsReport, ControlSummary,
    OracleReport, SimulateSummary, SweepReport,
};
pub use config::{ExperimentConfig, Setup};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("degenerate bounds: {0}")]
    Degenerate(String),
    #[error("{0}")]
    Io(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_MAX_PULSES: i32 = 4;
pub const EXIT_ORACLE_MISMATCH: i32 = 5;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Degenerate(_) => EXIT_DEGENERATE,
            Self::Io(_) | Self::NonFinite(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

//! Configuration-driven runner: parameter sweeps, figure presets and engine comparison.

mod config;
mod presets;
mod sweep;

pub use config::{Axis, Engine, Format, MechanicsKind, Params, ProfileKind, RunConfig};
pub use presets::{figure_preset, reproduce_figure, FigurePreset, PRESET_IDS};
pub use sweep::{
    compare_engines, compute, run_sweep, write_csv, CompareReport, FockDiagnostics, PointOutcome, Row, RowEngine,
    SweepOutput, SweepResult,
};

use crate::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("unknown figure preset '{0}'")]
    UnknownPreset(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("at {point}: {source}")]
    Engine { point: String, source: Error },

    #[error("engines disagree by {max:e}, above tolerance {tol:e}")]
    Mismatch { max: f64, tol: f64 },
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownPreset(_) | CliError::Io(_) => 2,
            CliError::Engine { source, .. } if !source.is_numerical() => 2,
            CliError::Engine { .. } | CliError::Mismatch { .. } => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

//! Configuration, run directories, sweeps and plots behind the `llb` binary.
//!
//! A run directory holds `config.json` (the resolved configuration, including
//! the step size and the fitted dissipation constant), `monitors.csv`,
//! `checkpoints/NNNNNN.llbs` with a `.json` sidecar each, and `summary.json`.

mod commands;
mod config;
mod plot;
mod run;
mod sweep;

use thiserror::Error;

use crate::lab::LabError;
use crate::solver::SolverError;
use crate::spectral::SpectralError;

pub use commands::{
    cmd_blowup_watch, cmd_plot, cmd_solve, cmd_stability, cmd_sweep_smallness, cmd_verify, execute, output_dir,
    Command, Invocation, Outcome, OUT_DIR_ENV, STABILITY_CSV, VERDICTS_FILE,
};
pub use config::{
    load_config, parse_config, ExperimentConfig, ExperimentKind, GridSpec, InitialData, StabilityConfig,
    SuiteConfig, SweepConfig,
};
pub use plot::{plot_run, PLOT_FILES};
pub use run::{
    read_monitors, BlowupReport, RunStatus, RunSummary, CHECKPOINT_DIR, CONFIG_FILE, MONITORS_FILE, SUMMARY_FILE,
};
pub use sweep::{Classification, SweepPoint, SweepResult, SWEEP_CSV, SWEEP_JSON};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("cannot resume: {0}")]
    Resume(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

impl ExperimentError {
    pub(crate) fn config(path: &str, message: String) -> Self {
        let path = if path.is_empty() || path == "." { "<root>".to_string() } else { path.to_string() };
        ExperimentError::Config { path, message }
    }

    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

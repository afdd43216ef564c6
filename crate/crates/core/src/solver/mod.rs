//! Time integration of the LLB system and its run-time monitors.

mod integrator;
mod monitors;
mod params;
mod probe;
mod rhs;

use thiserror::Error;

use crate::littlewood_paley::LpError;
use crate::spectral::SpectralError;

pub use integrator::{MonitorToggles, Solver, SolverSettings, SolverState};
pub use monitors::{
    blowup_integrand, conservation_residual, fit_dissipation_constant, monitor_phi_psi, phi_psi_from_blocks,
    smallness_monitor, split_solution, MonitorSample, SmallnessReport, MONITOR_COLUMNS,
};
pub use params::LlbParams;
pub use probe::{stability_probe, StabilityReport};
pub use rhs::{rhs_friedrichs, rhs_full, CUTOFF_TOLERANCE};

/// `∫‖u‖_{Ḃ^{3/2}_{2,1}} dt`.
pub const ACC_BESOV_32: &str = "besov_32";
/// `∫‖u‖_{Ḃ^{7/2}_{2,1}} dt`.
pub const ACC_BESOV_72: &str = "besov_72";
/// `∫‖u‖²_{Ḃ^{3/2}_{2,1}} dt`.
pub const ACC_BESOV_32_SQ: &str = "besov_32_squared";
pub const ACC_BLOWUP: &str = "blowup_integrand";
pub const ACC_PHI: &str = "phi";
pub const ACC_PSI: &str = "psi";
/// `∫ φ(t) e^{−C∫₀^t ψ} dt`.
pub const ACC_CONDITION: &str = "phi_weighted";

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("input leaks {leakage:e} of its mass outside the Friedrichs annulus")]
    CutoffViolation { leakage: f64 },
    #[error("step {step} at t = {t} diverged: {reason}")]
    StepDiverged {
        t: f64,
        step: u64,
        reason: String,
        last: Box<SolverState>,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

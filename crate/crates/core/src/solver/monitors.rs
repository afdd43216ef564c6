use serde::{Deserialize, Serialize};

use crate::littlewood_paley::{besov_from_l2_blocks, block_l2_norms, block_lp_norms, DyadicPartition, PHI_INNER};
use crate::spectral::{heat_propagate, SpectralField};

use super::{LlbParams, SolverError, SolverState};

/// One row of `monitors.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    pub t: f64,
    /// `‖u‖²_{L²}`.
    pub l2_energy: f64,
    /// `‖∇u‖_{L²}`.
    pub grad_l2: f64,
    /// `‖u‖⁴_{L⁴}`.
    pub l4_fourth_power: f64,
    pub conservation_residual: f64,
    pub besov_32: f64,
    pub besov_72: f64,
    pub phi_t: f64,
    pub psi_t: f64,
    pub blowup_integrand: f64,
    pub hm_norm: f64,
}

/// Fixed header of `monitors.csv`.
pub const MONITOR_COLUMNS: [&str; 11] = [
    "t",
    "L2_energy",
    "grad_L2",
    "L4_fourth_power",
    "conservation_residual",
    "besov_32",
    "besov_72",
    "phi_t",
    "psi_t",
    "blowup_integrand",
    "Hm_norm",
];

impl MonitorSample {
    pub fn values(&self) -> [f64; 11] {
        [
            self.t,
            self.l2_energy,
            self.grad_l2,
            self.l4_fourth_power,
            self.conservation_residual,
            self.besov_32,
            self.besov_72,
            self.phi_t,
            self.psi_t,
            self.blowup_integrand,
            self.hm_norm,
        ]
    }

    pub fn from_values(v: [f64; 11]) -> Self {
        MonitorSample {
            t: v[0],
            l2_energy: v[1],
            grad_l2: v[2],
            l4_fourth_power: v[3],
            conservation_residual: v[4],
            besov_32: v[5],
            besov_72: v[6],
            phi_t: v[7],
            psi_t: v[8],
            blowup_integrand: v[9],
            hm_norm: v[10],
        }
    }

    pub fn csv_header() -> String {
        MONITOR_COLUMNS.join(",")
    }

    /// Values with 17 significant digits.
    pub fn csv_row(&self) -> String {
        self.values().iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
    }
}

fn dissipation(s: &MonitorSample, params: &LlbParams) -> f64 {
    s.grad_l2 * s.grad_l2 + params.kappa * s.l2_energy + params.kappa * params.mu * s.l4_fourth_power
}

/// Trapezoidal defect of the energy identity between two consecutive samples,
/// relative to the mean dissipation.
pub fn conservation_residual(prev: &MonitorSample, next: &MonitorSample, params: &LlbParams) -> f64 {
    let dt = next.t - prev.t;
    if dt <= 0.0 {
        return 0.0;
    }
    let mid = 0.5 * (dissipation(prev, params) + dissipation(next, params));
    (0.5 * (next.l2_energy - prev.l2_energy) / dt + mid) / (mid + 1e-30)
}

/// `(φ, ψ)` from the block `L²` norms of `u^L`.
pub fn phi_psi_from_blocks(blocks: &[f64], rho: f64, p: &DyadicPartition) -> (f64, f64) {
    let b = |s: f64| besov_from_l2_blocks(blocks, s, 1.0, p);
    let b32 = b(1.5);
    let b72 = b(3.5);
    let phi = b32 + b32 * b72;
    let psi = b(2.5).powi(2)
        + b72
        + b(2.0 / rho + 1.5).powf(rho)
        + b(3.5 - 1.5).powf(rho / (rho - 1.0))
        + 1.0;
    (phi, psi)
}

pub fn monitor_phi_psi(u_l: &SpectralField, params: &LlbParams, p: &DyadicPartition) -> (f64, f64) {
    phi_psi_from_blocks(&block_l2_norms(u_l, p), params.rho, p)
}

/// `(u^L, ũ)` with `u^L = e^{t(Δ − κ')}u₀`, `κ' = κ` when damped and `0` otherwise.
pub fn split_solution(
    state: &SolverState,
    u0: &SpectralField,
    params: &LlbParams,
    damped: bool,
) -> (SpectralField, SpectralField) {
    let damping = if damped { params.kappa } else { 0.0 };
    let u_l = heat_propagate(u0, state.t, damping);
    let tilde = &state.u - &u_l;
    (u_l, tilde)
}

/// `‖u‖²_{Ḃ^{3/p}_{p,1}} + ‖u‖^{2/(2−δ)}_{Ḃ^{2−δ}_{∞,∞}}`.
pub fn blowup_integrand(u: &SpectralField, params: &LlbParams, p: &DyadicPartition) -> Result<f64, SolverError> {
    let l2 = block_l2_norms(u, p);
    blowup_from_l2(u, &l2, params, p)
}

pub(crate) fn blowup_from_l2(
    u: &SpectralField,
    l2: &[f64],
    params: &LlbParams,
    p: &DyadicPartition,
) -> Result<f64, SolverError> {
    let pb = params.p_blowup;
    let first = if pb == 2.0 {
        besov_from_l2_blocks(l2, 1.5, 1.0, p)
    } else {
        besov_from_l2_blocks(&block_lp_norms(u, pb, p)?, 3.0 / pb, 1.0, p)
    };
    let sup = block_lp_norms(u, f64::INFINITY, p)?;
    let s = 2.0 - params.delta;
    let second = p
        .indices()
        .zip(&sup)
        .map(|(j, &n)| 2f64.powf(j as f64 * s) * n)
        .fold(0.0, f64::max);
    Ok(first * first + second.powf(2.0 / s))
}

/// Smallest value of `|k|²/4^j` over the modes each block touches.
///
/// Bounds the dyadic dissipation `‖∇Δ̇ⱼu‖² >= C₁ 4^j ‖Δ̇ⱼu‖²` from below on
/// the given grid.
pub fn fit_dissipation_constant(p: &DyadicPartition) -> f64 {
    let g = p.grid();
    let mut best = f64::INFINITY;
    for idx in 1..g.points() {
        let k2 = g.k_squared(idx);
        for j in p.indices() {
            if p.weight(j, idx) > 0.0 {
                best = best.min(k2 / 4f64.powi(j));
            }
        }
    }
    debug_assert!(best >= PHI_INNER * PHI_INNER);
    best
}

/// Terms of `sup‖u‖_{Ḃ^{3/2}} + (C₁/2)∫‖u‖_{Ḃ^{7/2}} + (κ/2)∫‖u‖_{Ḃ^{3/2}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallnessReport {
    pub passed: bool,
    pub eps: f64,
    pub c1: f64,
    pub lhs: f64,
    pub sup_term: f64,
    pub dissipation_term: f64,
    pub damping_term: f64,
}

pub fn smallness_monitor(state: &SolverState, params: &LlbParams, eps: f64, c1: f64) -> SmallnessReport {
    let acc = |k: &str| state.accumulators.get(k).copied().unwrap_or(0.0);
    let sup_term = state.sup_besov_32;
    let dissipation_term = 0.5 * c1 * acc(super::ACC_BESOV_72);
    let damping_term = 0.5 * params.kappa * acc(super::ACC_BESOV_32);
    let lhs = sup_term + dissipation_term + damping_term;
    SmallnessReport {
        passed: lhs <= eps,
        eps,
        c1,
        lhs,
        sup_term,
        dissipation_term,
        damping_term,
    }
}

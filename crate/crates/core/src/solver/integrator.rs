use std::collections::BTreeMap;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::littlewood_paley::{besov_from_l2_blocks, DyadicPartition};
use crate::spectral::products::{dealias_size, BoxEval};
use crate::spectral::{in_cutoff, to_physical_fast, Grid, SpectralField};

use super::monitors::{blowup_from_l2, conservation_residual, fit_dissipation_constant, phi_psi_from_blocks};
use super::rhs::cutoff_keep;
use super::{
    LlbParams, MonitorSample, SolverError, ACC_BESOV_32, ACC_BESOV_32_SQ, ACC_BESOV_72, ACC_BLOWUP,
    ACC_CONDITION, ACC_PHI, ACC_PSI,
};

/// Which of the costlier monitors are evaluated; disabled ones read `NaN`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorToggles {
    #[serde(default = "yes")]
    pub l4: bool,
    #[serde(default = "yes")]
    pub phi_psi: bool,
    #[serde(default = "yes")]
    pub blowup: bool,
    #[serde(default = "yes")]
    pub sobolev: bool,
}

fn yes() -> bool {
    true
}

impl Default for MonitorToggles {
    fn default() -> Self {
        MonitorToggles { l4: true, phi_psi: true, blowup: true, sobolev: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    /// Time step; `None` picks `0.5/(1 + max|k|²·‖u₀‖_∞)`.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Divergence threshold on `‖u‖_{L²}`, `‖u‖_{Ḃ^{3/2}_{2,1}}` and `‖u‖_{H^m}`.
    #[serde(default = "default_ceiling")]
    pub ceiling: f64,
    #[serde(default = "default_halvings")]
    pub max_halvings: u32,
    /// Use `e^{t(Δ−κ)}u₀` instead of `e^{tΔ}u₀` as `u^L`.
    #[serde(default)]
    pub damped_split: bool,
    #[serde(default)]
    pub monitors: MonitorToggles,
    /// Dissipation constant of the smallness monitor; fitted from the grid when absent.
    #[serde(default)]
    pub c1: Option<f64>,
    /// Constant `C` in `∫ φ(t) e^{C∫_t^T ψ} dt`; the functional is skipped when absent.
    #[serde(default)]
    pub condition_c: Option<f64>,
}

fn default_ceiling() -> f64 {
    1e8
}
fn default_halvings() -> u32 {
    6
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            dt: None,
            ceiling: default_ceiling(),
            max_halvings: default_halvings(),
            damped_split: false,
            monitors: MonitorToggles::default(),
            c1: None,
            condition_c: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub u: SpectralField,
    pub t: f64,
    pub dt: f64,
    pub step: u64,
    /// Trapezoidal time integrals keyed by monitor name.
    pub accumulators: BTreeMap<String, f64>,
    pub sup_besov_32: f64,
    pub last: MonitorSample,
}

/// Integrating-factor RK4 for the (optionally Friedrichs-truncated) system.
pub struct Solver {
    grid: Grid,
    partition: DyadicPartition,
    params: LlbParams,
    settings: SolverSettings,
    u0: SpectralField,
    boxe: BoxEval,
    mask: Vec<f64>,
    k2: Vec<f64>,
    lambda: Vec<f64>,
    hm_weight: Vec<f64>,
    c1: f64,
    cache: Option<(f64, Vec<f64>, Vec<f64>)>,
}

impl Solver {
    /// Projects `u0` onto the evolved modes (the annulus `[1/n, n]` for
    /// Friedrichs runs, all non-Nyquist modes otherwise).
    pub fn new(u0: &SpectralField, params: LlbParams, settings: SolverSettings) -> Result<Self, SolverError> {
        params.validate()?;
        if !u0.is_real() {
            return Err(SolverError::InvalidParams("initial data must be real".into()));
        }
        if !u0.is_finite() {
            return Err(SolverError::InvalidParams("initial data is not finite".into()));
        }
        if let Some(dt) = settings.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(SolverError::InvalidParams("dt must be positive".into()));
            }
        }
        let grid = *u0.grid();
        let partition = DyadicPartition::build(grid)?;
        let np = grid.points();
        let keep = |idx: usize| match params.cutoff_n {
            Some(n) => in_cutoff(grid.k_squared(idx), n),
            None => !grid.is_nyquist(idx),
        };
        let kb = cutoff_keep(&grid, params.cutoff_n);
        let boxe = BoxEval::new(&grid, kb, dealias_size(kb, kb, 3));
        let idx = boxe.full_indices();
        let mask: Vec<f64> = idx.iter().map(|&i| if keep(i) { 1.0 } else { 0.0 }).collect();
        let k2: Vec<f64> = idx.iter().map(|&i| grid.k_squared(i)).collect();
        let lambda = k2.iter().map(|k| k + params.kappa).collect();
        let hm_weight = k2.iter().map(|k| (1.0 + k).powf(params.sobolev_m)).collect();
        let mut c = boxe.gather(u0.coeffs(), np);
        let b = boxe.len();
        for (e, z) in c.iter_mut().enumerate() {
            *z *= mask[e % b];
        }
        let u0 = SpectralField::from_parts(grid, boxe.scatter(&c, np), true);
        let c1 = match settings.c1 {
            Some(c) => c,
            None => fit_dissipation_constant(&partition),
        };
        Ok(Solver {
            grid,
            partition,
            params,
            settings,
            u0,
            boxe,
            mask,
            k2,
            lambda,
            hm_weight,
            c1,
            cache: None,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    pub fn params(&self) -> &LlbParams {
        &self.params
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    /// Initial data after projection.
    pub fn initial_data(&self) -> &SpectralField {
        &self.u0
    }

    pub fn dissipation_constant(&self) -> f64 {
        self.c1
    }

    /// `0.5/(1 + max|k|²·‖u₀‖_∞)` over the evolved modes.
    pub fn default_dt(&self) -> f64 {
        let k2 = self
            .k2
            .iter()
            .zip(&self.mask)
            .fold(0.0f64, |a, (&k, &m)| if m > 0.0 { a.max(k) } else { a });
        let sup = to_physical_fast(&self.u0).max_abs();
        0.5 / (1.0 + k2 * sup)
    }

    pub fn initial_state(&self) -> Result<SolverState, SolverError> {
        let dt = self.settings.dt.unwrap_or_else(|| self.default_dt());
        let last = self.sample(&self.u0, 0.0, None)?;
        let mut accumulators = BTreeMap::new();
        for k in self.accumulator_names() {
            accumulators.insert(k.to_string(), 0.0);
        }
        Ok(SolverState {
            u: self.u0.clone(),
            t: 0.0,
            dt,
            step: 0,
            accumulators,
            sup_besov_32: last.besov_32,
            last,
        })
    }

    fn accumulator_names(&self) -> Vec<&'static str> {
        let mut v = vec![ACC_BESOV_32, ACC_BESOV_72, ACC_BESOV_32_SQ];
        if self.settings.monitors.blowup {
            v.push(ACC_BLOWUP);
        }
        if self.settings.monitors.phi_psi {
            v.push(ACC_PHI);
            v.push(ACC_PSI);
            if self.settings.condition_c.is_some() {
                v.push(ACC_CONDITION);
            }
        }
        v
    }

    /// `∫₀^t φ(s) e^{C∫_s^t ψ} ds` from the accumulators, when `C` is configured.
    pub fn condition_functional(&self, state: &SolverState) -> Option<f64> {
        let c = self.settings.condition_c?;
        let w = state.accumulators.get(ACC_CONDITION)?;
        let psi = state.accumulators.get(ACC_PSI)?;
        Some(w * (c * psi).exp())
    }

    /// Monitors of `u` at time `t`; the residual is taken against `prev`.
    pub fn sample(&self, u: &SpectralField, t: f64, prev: Option<&MonitorSample>) -> Result<MonitorSample, SolverError> {
        if u.grid() != &self.grid {
            return Err(SolverError::InvalidParams("field lives on another grid".into()));
        }
        let uc = self.boxe.gather(u.coeffs(), self.grid.points());
        self.sample_compact(&uc, u, t, prev)
    }

    fn sample_compact(
        &self,
        uc: &[Complex64],
        u: &SpectralField,
        t: f64,
        prev: Option<&MonitorSample>,
    ) -> Result<MonitorSample, SolverError> {
        let p = &self.partition;
        let b = self.boxe.len();
        let jm = p.j_min();
        let mut energy = 0.0;
        let mut grad = 0.0;
        let mut hm = 0.0;
        let mut blocks = vec![0.0; p.block_count()];
        for (e, &idx) in self.boxe.full_indices().iter().enumerate() {
            let q = uc[e].norm_sqr() + uc[b + e].norm_sqr() + uc[2 * b + e].norm_sqr();
            if q == 0.0 {
                continue;
            }
            energy += q;
            grad += self.k2[e] * q;
            hm += self.hm_weight[e] * q;
            if idx > 0 {
                let m = p.mode(idx);
                let j = (m.j0 - jm) as usize;
                blocks[j] += m.w[0] * m.w[0] * q;
                if m.w[1] > 0.0 {
                    blocks[j + 1] += m.w[1] * m.w[1] * q;
                }
            }
        }
        let vol = self.grid.volume();
        for x in &mut blocks {
            *x = (*x * vol).sqrt();
        }
        let toggles = self.settings.monitors;
        let l4 = if toggles.l4 {
            self.boxe.fourth_power_integral(uc, vol)
        } else {
            f64::NAN
        };
        let (phi_t, psi_t) = if toggles.phi_psi { self.phi_psi_at(t) } else { (f64::NAN, f64::NAN) };
        let blowup = if toggles.blowup {
            blowup_from_l2(u, &blocks, &self.params, p)?
        } else {
            f64::NAN
        };
        let mut s = MonitorSample {
            t,
            l2_energy: energy * vol,
            grad_l2: (grad * vol).sqrt(),
            l4_fourth_power: l4,
            conservation_residual: 0.0,
            besov_32: besov_from_l2_blocks(&blocks, 1.5, 1.0, p),
            besov_72: besov_from_l2_blocks(&blocks, 3.5, 1.0, p),
            phi_t,
            psi_t,
            blowup_integrand: blowup,
            hm_norm: if toggles.sobolev { (hm * vol).sqrt() } else { f64::NAN },
        };
        if let Some(prev) = prev {
            s.conservation_residual = conservation_residual(prev, &s, &self.params);
        }
        Ok(s)
    }

    fn phi_psi_at(&self, t: f64) -> (f64, f64) {
        let np = self.grid.points();
        let c = self.u0.coeffs();
        let p = &self.partition;
        let jm = p.j_min();
        let damping = if self.settings.damped_split { self.params.kappa } else { 0.0 };
        let mut blocks = vec![0.0; p.block_count()];
        for (e, &idx) in self.boxe.full_indices().iter().enumerate() {
            if idx == 0 {
                continue;
            }
            let q = c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr();
            if q == 0.0 {
                continue;
            }
            let q = q * (-2.0 * (self.k2[e] + damping) * t).exp();
            let m = p.mode(idx);
            let j = (m.j0 - jm) as usize;
            blocks[j] += m.w[0] * m.w[0] * q;
            if m.w[1] > 0.0 {
                blocks[j + 1] += m.w[1] * m.w[1] * q;
            }
        }
        let vol = self.grid.volume();
        for x in &mut blocks {
            *x = (*x * vol).sqrt();
        }
        phi_psi_from_blocks(&blocks, self.params.rho, p)
    }

    fn multipliers(&mut self, h: f64) -> (Vec<f64>, Vec<f64>) {
        if let Some((dt, half, full)) = &self.cache {
            if *dt == h {
                return (half.clone(), full.clone());
            }
        }
        let half: Vec<f64> = self.lambda.iter().map(|l| (-l * 0.5 * h).exp()).collect();
        let full: Vec<f64> = self.lambda.iter().map(|l| (-l * h).exp()).collect();
        self.cache = Some((h, half.clone(), full.clone()));
        (half, full)
    }

    fn nonlinear(&self, u: &[Complex64]) -> Vec<Complex64> {
        let b = self.boxe.len();
        let lap: Vec<Complex64> = u.iter().enumerate().map(|(e, z)| z * -self.k2[e % b]).collect();
        let mut out = self
            .boxe
            .llb(u, &lap, self.params.cross_coeff, self.params.kappa * self.params.mu);
        for (e, z) in out.iter_mut().enumerate() {
            *z *= self.mask[e % b];
        }
        out
    }

    fn advance_compact(&mut self, u: &[Complex64], h: f64) -> Vec<Complex64> {
        let (eh, ef) = self.multipliers(h);
        let b = self.boxe.len();
        let k1 = self.nonlinear(u);
        let stage: Vec<Complex64> = (0..3 * b).map(|x| (u[x] + k1[x] * (0.5 * h)) * eh[x % b]).collect();
        let k2 = self.nonlinear(&stage);
        let stage: Vec<Complex64> = (0..3 * b).map(|x| u[x] * eh[x % b] + k2[x] * (0.5 * h)).collect();
        let k3 = self.nonlinear(&stage);
        let stage: Vec<Complex64> = (0..3 * b).map(|x| u[x] * ef[x % b] + k3[x] * (h * eh[x % b])).collect();
        let k4 = self.nonlinear(&stage);
        (0..3 * b)
            .map(|x| {
                let (a, f) = (eh[x % b], ef[x % b]);
                u[x] * f + (k1[x] * f + (k2[x] + k3[x]) * (2.0 * a) + k4[x]) * (h / 6.0)
            })
            .collect()
    }

    fn diverged(state: &SolverState, reason: String) -> SolverError {
        SolverError::StepDiverged { t: state.t, step: state.step, reason, last: Box::new(state.clone()) }
    }

    fn healthy(&self, s: &MonitorSample) -> Result<(), String> {
        for (name, v) in super::MONITOR_COLUMNS.iter().zip(s.values()) {
            if v.is_infinite() {
                return Err(format!("{name} is infinite"));
            }
        }
        let tg = self.settings.monitors;
        let required = [
            ("L2_energy", s.l2_energy, true),
            ("besov_32", s.besov_32, true),
            ("grad_L2", s.grad_l2, true),
            ("L4_fourth_power", s.l4_fourth_power, tg.l4),
            ("phi_t", s.phi_t, tg.phi_psi),
            ("blowup_integrand", s.blowup_integrand, tg.blowup),
            ("Hm_norm", s.hm_norm, tg.sobolev),
        ];
        for (name, v, on) in required {
            if on && !v.is_finite() {
                return Err(format!("{name} is not finite"));
            }
        }
        let c = self.settings.ceiling;
        for (name, v, on) in [
            ("L2 norm", s.l2_energy.sqrt(), true),
            ("besov_32", s.besov_32, true),
            ("Hm_norm", s.hm_norm, tg.sobolev),
        ] {
            if on && v > c {
                return Err(format!("{name} = {v:e} exceeds ceiling {c:e}"));
            }
        }
        Ok(())
    }

    /// One step of length `h`.
    pub fn step(&mut self, state: &SolverState, h: f64) -> Result<SolverState, SolverError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(SolverError::InvalidParams("step length must be positive".into()));
        }
        let np = self.grid.points();
        let uc = self.boxe.gather(state.u.coeffs(), np);
        let next = self.advance_compact(&uc, h);
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Self::diverged(state, "non-finite coefficient".into()));
        }
        let u = SpectralField::from_parts(self.grid, self.boxe.scatter(&next, np), true);
        let t = state.t + h;
        let sample = match self.sample_compact(&next, &u, t, Some(&state.last)) {
            Ok(s) => s,
            Err(e) => return Err(Self::diverged(state, e.to_string())),
        };
        if let Err(reason) = self.healthy(&sample) {
            return Err(Self::diverged(state, reason));
        }
        let prev = &state.last;
        let mut acc = state.accumulators.clone();
        let trap = |a: f64, b: f64| 0.5 * h * (a + b);
        let mut add = |k: &str, v: f64| {
            if let Some(x) = acc.get_mut(k) {
                *x += v;
            }
        };
        add(ACC_BESOV_32, trap(prev.besov_32, sample.besov_32));
        add(ACC_BESOV_72, trap(prev.besov_72, sample.besov_72));
        add(ACC_BESOV_32_SQ, trap(prev.besov_32.powi(2), sample.besov_32.powi(2)));
        add(ACC_BLOWUP, trap(prev.blowup_integrand, sample.blowup_integrand));
        add(ACC_PHI, trap(prev.phi_t, sample.phi_t));
        if let Some(c) = self.settings.condition_c {
            let psi0 = state.accumulators.get(ACC_PSI).copied().unwrap_or(0.0);
            let psi1 = psi0 + trap(prev.psi_t, sample.psi_t);
            add(ACC_CONDITION, trap(prev.phi_t * (-c * psi0).exp(), sample.phi_t * (-c * psi1).exp()));
        }
        add(ACC_PSI, trap(prev.psi_t, sample.psi_t));
        Ok(SolverState {
            u,
            t,
            dt: state.dt,
            step: state.step + 1,
            accumulators: acc,
            sup_besov_32: state.sup_besov_32.max(sample.besov_32),
            last: sample,
        })
    }

    /// Steps to `horizon`, halving `dt` on divergence up to `max_halvings` times.
    ///
    /// The last step is shortened to land on `horizon`. `on_step` sees every
    /// accepted state and stops the run early by returning `false`.
    pub fn advance(
        &mut self,
        mut state: SolverState,
        horizon: f64,
        mut on_step: impl FnMut(&SolverState) -> bool,
    ) -> Result<SolverState, SolverError> {
        let mut halvings = 0;
        while state.t < horizon {
            let rem = horizon - state.t;
            let last = rem <= state.dt * (1.0 + 1e-9);
            let h = if last {
                rem
            } else if rem < 2.0 * state.dt {
                0.5 * rem
            } else {
                state.dt
            };
            match self.step(&state, h) {
                Ok(mut next) => {
                    if last {
                        next.t = horizon;
                        next.last.t = horizon;
                    }
                    state = next;
                    if !on_step(&state) {
                        break;
                    }
                }
                Err(SolverError::StepDiverged { .. }) if halvings < self.settings.max_halvings => {
                    halvings += 1;
                    state.dt *= 0.5;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(state)
    }

    pub fn run(&mut self, horizon: f64) -> Result<SolverState, SolverError> {
        let s = self.initial_state()?;
        self.advance(s, horizon, |_| true)
    }
}

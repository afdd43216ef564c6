use serde::{Deserialize, Serialize};

use crate::littlewood_paley::{besov_norm, BesovParams, DyadicPartition};
use crate::spectral::SpectralField;

use super::{LlbParams, Solver, SolverError, SolverSettings, ACC_BESOV_32_SQ};

/// Growth of `‖δu(t)‖_{Ḃ^{3/2}_{2,1}}` between two runs against the Gronwall bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub times: Vec<f64>,
    pub ratios: Vec<f64>,
    pub initial_difference: f64,
    /// `∫₀^T ‖u₁‖²_{Ḃ^{3/2}_{2,1}} + ‖u₂‖²_{Ḃ^{3/2}_{2,1}} dt`.
    pub gronwall_budget: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub within_bound: bool,
}

fn b32(f: &SpectralField, p: &DyadicPartition) -> Result<f64, SolverError> {
    Ok(besov_norm(f, BesovParams::homogeneous(1.5, 2.0, 1.0), p)?.value)
}

/// Runs from `u0` and from `u0 + scale·direction/‖direction‖_{Ḃ^{3/2}_{2,1}}`
/// in lockstep with a shared step size.
pub fn stability_probe(
    u0: &SpectralField,
    direction: &SpectralField,
    scale: f64,
    horizon: f64,
    params: &LlbParams,
    settings: &SolverSettings,
) -> Result<StabilityReport, SolverError> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(SolverError::InvalidParams("perturbation scale must be positive".into()));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(SolverError::InvalidParams("horizon must be positive".into()));
    }
    let p = DyadicPartition::build(*u0.grid())?;
    let dn = b32(direction, &p)?;
    if dn == 0.0 {
        return Err(SolverError::InvalidParams("perturbation direction has zero norm".into()));
    }
    let perturbed = u0.axpy(scale / dn, direction);
    let mut s1 = Solver::new(u0, params.clone(), settings.clone())?;
    let mut s2 = Solver::new(&perturbed, params.clone(), settings.clone())?;
    let d0 = b32(&(s2.initial_data() - s1.initial_data()), &p)?;
    if d0 == 0.0 {
        return Err(SolverError::InvalidParams("perturbation vanishes after projection".into()));
    }
    let dt = settings.dt.unwrap_or_else(|| s1.default_dt().min(s2.default_dt()));
    let mut a = s1.initial_state()?;
    let mut b = s2.initial_state()?;
    a.dt = dt;
    b.dt = dt;
    let mut times = vec![0.0];
    let mut ratios = vec![1.0];
    let steps = (horizon / dt - 1e-9).ceil().max(1.0) as u64;
    let h = horizon / steps as f64;
    for _ in 0..steps {
        let (ra, rb) = std::thread::scope(|sc| {
            let ja = sc.spawn(|| s1.step(&a, h));
            let rb = s2.step(&b, h);
            (ja.join().expect("probe worker panicked"), rb)
        });
        a = ra?;
        b = rb?;
        times.push(a.t);
        ratios.push(b32(&(&b.u - &a.u), &p)? / d0);
    }
    let acc = |s: &super::SolverState| s.accumulators.get(ACC_BESOV_32_SQ).copied().unwrap_or(0.0);
    let budget = acc(&a) + acc(&b);
    let bound = budget.exp();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(StabilityReport {
        times,
        ratios,
        initial_difference: d0,
        gronwall_budget: budget,
        bound,
        max_ratio,
        within_bound: max_ratio <= bound,
    })
}

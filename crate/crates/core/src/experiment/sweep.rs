use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::config::{rescale_besov32, ExperimentConfig};
use super::run::{run_solve, RunStatus};
use super::ExperimentError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    /// Completed with `‖u‖_{Ḃ^{3/2}_{2,1}}` never above its initial value and ending below it.
    Decayed,
    /// Completed otherwise.
    Bounded,
    /// Stopped by divergence, which may be a resolution artifact.
    DivergedGridLimited,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub amplitude: f64,
    pub directory: String,
    pub classification: Classification,
    pub smallness_passed: bool,
    pub smallness_lhs: f64,
    pub smallness_eps: f64,
    pub blowup_integral: f64,
    pub max_besov_32: f64,
    pub final_besov_32: f64,
    pub t_final: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// Values of `‖u₀‖_{Ḃ^{3/2}_{2,1}}`.
    pub axis: Vec<f64>,
    pub points: Vec<SweepPoint>,
    /// Whether the smallest amplitude decayed.
    pub smallest_decayed: bool,
}

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";

fn run_point(cfg: &ExperimentConfig, base: &Path, i: usize, amp: f64) -> Result<SweepPoint, ExperimentError> {
    let sweep = cfg.sweep.as_ref().expect("validated");
    let mut point_cfg = cfg.clone();
    point_cfg.kind = super::ExperimentKind::Solve;
    point_cfg.sweep = None;
    point_cfg.initial_besov32 = Some(amp);
    let eps = sweep.eps_factor * amp;
    point_cfg.smallness_eps = Some(eps);
    let u0 = rescale_besov32(&cfg.initial_field()?, amp)?;
    let name = format!("point_{i:02}");
    let s = &run_solve(&point_cfg, &u0, &base.join(&name), false)?;
    let initial = amp;
    let classification = match s.status {
        RunStatus::Diverged => Classification::DivergedGridLimited,
        _ if s.sup_besov_32 <= initial * (1.0 + 1e-10) && s.terminal.besov_32 < initial => Classification::Decayed,
        _ => Classification::Bounded,
    };
    let sm = s.smallness.clone().expect("eps configured");
    Ok(SweepPoint {
        amplitude: amp,
        directory: name,
        classification,
        smallness_passed: sm.passed,
        smallness_lhs: sm.lhs,
        smallness_eps: eps,
        blowup_integral: s.blowup.as_ref().map_or(f64::NAN, |b| b.integral),
        max_besov_32: s.sup_besov_32,
        final_besov_32: s.terminal.besov_32,
        t_final: s.t_final,
    })
}

/// One solve per ladder value on a bounded worker pool; `sweep.csv` and
/// `sweep.json` are written once all points finish.
pub fn sweep_smallness(cfg: &ExperimentConfig, dir: &Path, workers: usize) -> Result<SweepResult, ExperimentError> {
    let ladder = cfg.sweep.as_ref().expect("validated").amplitudes.clone();
    fs::create_dir_all(dir)?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SweepPoint, ExperimentError>>>> =
        Mutex::new((0..ladder.len()).map(|_| None).collect());
    let workers = workers.clamp(1, ladder.len());
    std::thread::scope(|sc| {
        for _ in 0..workers {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= ladder.len() {
                    break;
                }
                let r = run_point(cfg, dir, i, ladder[i]);
                results.lock().expect("sweep results lock")[i] = Some(r);
            });
        }
    });
    let mut points = Vec::with_capacity(ladder.len());
    for r in results.into_inner().expect("sweep results lock") {
        points.push(r.expect("every point ran")?);
    }
    let result = SweepResult {
        axis: ladder,
        smallest_decayed: points[0].classification == Classification::Decayed,
        points,
    };
    let mut csv = String::from(
        "amplitude,classification,smallness_passed,smallness_lhs,smallness_eps,blowup_integral,max_besov_32,final_besov_32,t_final\n",
    );
    for p in &result.points {
        let class = serde_json::to_value(p.classification).expect("enum serializes");
        csv.push_str(&format!(
            "{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            p.amplitude,
            class.as_str().unwrap_or_default(),
            p.smallness_passed,
            p.smallness_lhs,
            p.smallness_eps,
            p.blowup_integral,
            p.max_besov_32,
            p.final_besov_32,
            p.t_final
        ));
    }
    fs::File::create(dir.join(SWEEP_CSV))?.write_all(csv.as_bytes())?;
    let json = serde_json::to_vec_pretty(&result).expect("sweep serializes");
    fs::File::create(dir.join(SWEEP_JSON))?.write_all(&json)?;
    Ok(result)
}

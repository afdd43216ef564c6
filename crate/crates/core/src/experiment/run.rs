use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::solver::{
    smallness_monitor, MonitorSample, SmallnessReport, Solver, SolverError, SolverState, ACC_BLOWUP,
};
use crate::spectral::{read_checkpoint, write_checkpoint, SpectralField};

use super::config::ExperimentConfig;
use super::ExperimentError;

pub const CONFIG_FILE: &str = "config.json";
pub const MONITORS_FILE: &str = "monitors.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Diverged,
    Stopped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub integral: f64,
    pub last_increment: f64,
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub steps: u64,
    pub t_final: f64,
    pub horizon: f64,
    pub dt: f64,
    pub c1: f64,
    pub terminal: MonitorSample,
    pub sup_besov_32: f64,
    pub accumulators: BTreeMap<String, f64>,
    pub monitors_finite: bool,
    pub max_abs_conservation_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub smallness: Option<SmallnessReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub condition_functional: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub blowup: Option<BlowupReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub divergence: Option<String>,
}

/// Solver bookkeeping stored next to each checkpoint.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct Sidecar {
    step: u64,
    t: f64,
    dt: f64,
    rows: u64,
    accumulators: BTreeMap<String, f64>,
    sup_besov_32: f64,
    /// Last monitor sample; strings keep `NaN` entries of disabled monitors.
    last: Vec<String>,
}

impl Sidecar {
    fn of(s: &SolverState) -> Self {
        Sidecar {
            step: s.step,
            t: s.t,
            dt: s.dt,
            rows: s.step + 1,
            accumulators: s.accumulators.clone(),
            sup_besov_32: s.sup_besov_32,
            last: s.last.values().iter().map(|v| v.to_string()).collect(),
        }
    }

    fn restore(self, u: SpectralField) -> Result<SolverState, ExperimentError> {
        let bad = || ExperimentError::Resume("malformed checkpoint sidecar".into());
        if self.last.len() != 11 {
            return Err(bad());
        }
        let mut v = [0.0; 11];
        for (x, s) in v.iter_mut().zip(&self.last) {
            *x = s.parse().map_err(|_| bad())?;
        }
        Ok(SolverState {
            u,
            t: self.t,
            dt: self.dt,
            step: self.step,
            accumulators: self.accumulators,
            sup_besov_32: self.sup_besov_32,
            last: MonitorSample::from_values(v),
        })
    }
}

fn checkpoint_paths(dir: &Path, step: u64) -> (PathBuf, PathBuf) {
    let base = dir.join(CHECKPOINT_DIR);
    (base.join(format!("{step:06}.llbs")), base.join(format!("{step:06}.json")))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

fn save_checkpoint(dir: &Path, s: &SolverState) -> Result<(), ExperimentError> {
    let (bin, side) = checkpoint_paths(dir, s.step);
    write_checkpoint(&bin, &s.u, s.t)?;
    let json = serde_json::to_vec_pretty(&Sidecar::of(s)).expect("sidecar serializes");
    write_atomic(&side, &json)?;
    Ok(())
}

/// Latest checkpoint with both the field and its sidecar present.
fn latest_checkpoint(dir: &Path) -> Result<Option<SolverState>, ExperimentError> {
    let base = dir.join(CHECKPOINT_DIR);
    let Ok(entries) = fs::read_dir(&base) else { return Ok(None) };
    let mut steps: Vec<u64> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            name.strip_suffix(".json")?.parse().ok()
        })
        .collect();
    steps.sort_unstable();
    while let Some(step) = steps.pop() {
        let (bin, side) = checkpoint_paths(dir, step);
        if !bin.exists() {
            continue;
        }
        let sc: Sidecar = serde_json::from_slice(&fs::read(&side)?)
            .map_err(|e| ExperimentError::Resume(format!("{}: {e}", side.display())))?;
        let (u, t) = read_checkpoint(&bin)?;
        if t != sc.t {
            return Err(ExperimentError::Resume(format!("{} disagrees with its sidecar", bin.display())));
        }
        return sc.restore(u).map(Some);
    }
    Ok(None)
}

/// Keeps the header and the first `rows` data rows of `monitors.csv`.
fn truncate_monitors(path: &Path, rows: u64) -> Result<(), ExperimentError> {
    let f = BufReader::new(File::open(path)?);
    let mut keep = String::new();
    for (i, line) in f.lines().enumerate() {
        if i as u64 > rows {
            break;
        }
        keep.push_str(&line?);
        keep.push('\n');
    }
    if keep.lines().count() as u64 != rows + 1 {
        return Err(ExperimentError::Resume("monitors.csv is shorter than the checkpoint".into()));
    }
    write_atomic(path, keep.as_bytes())?;
    Ok(())
}

/// Parses `monitors.csv` into samples.
pub fn read_monitors(path: &Path) -> Result<Vec<MonitorSample>, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|e| ExperimentError::MissingData(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next() != Some(MonitorSample::csv_header().as_str()) {
        return Err(ExperimentError::MissingData(format!("{}: bad header", path.display())));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let vals: Vec<f64> = line
            .split(',')
            .map(|x| x.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| ExperimentError::MissingData(format!("row {}: {e}", i + 1)))?;
        let arr: [f64; 11] = vals
            .try_into()
            .map_err(|_| ExperimentError::MissingData(format!("row {}: expected 11 columns", i + 1)))?;
        out.push(MonitorSample::from_values(arr));
    }
    Ok(out)
}

/// Steps between checkpoints: `⌈T/(10·dt)⌉` unless configured.
fn cadence(cfg: &ExperimentConfig, dt: f64) -> u64 {
    cfg.checkpoint_every
        .unwrap_or_else(|| ((cfg.horizon() / (10.0 * dt)).ceil() as u64).max(1))
}

/// Runs (or resumes) one solve into `dir`.
pub(crate) fn run_solve(
    cfg: &ExperimentConfig,
    u0: &SpectralField,
    dir: &Path,
    resume: bool,
) -> Result<RunSummary, ExperimentError> {
    fs::create_dir_all(dir.join(CHECKPOINT_DIR))?;
    let mut solver = Solver::new(u0, cfg.params().clone(), cfg.solver.clone())?;
    let restored = if resume { latest_checkpoint(dir)? } else { None };
    let monitors = dir.join(MONITORS_FILE);
    let (state, every) = match restored {
        Some(s) => {
            let stored = load_resolved(dir)?;
            truncate_monitors(&monitors, s.step + 1)?;
            let dt0 = stored.solver.dt.unwrap_or(s.dt);
            (s, cadence(&stored, dt0))
        }
        None => {
            let s = solver.initial_state()?;
            let mut resolved = cfg.clone();
            resolved.solver.dt = Some(s.dt);
            resolved.solver.c1 = Some(solver.dissipation_constant());
            let json = serde_json::to_vec_pretty(&resolved).expect("config serializes");
            write_atomic(&dir.join(CONFIG_FILE), &json)?;
            let mut f = File::create(&monitors)?;
            writeln!(f, "{}", MonitorSample::csv_header())?;
            writeln!(f, "{}", s.last.csv_row())?;
            f.sync_all()?;
            save_checkpoint(dir, &s)?;
            let every = cadence(cfg, s.dt);
            (s, every)
        }
    };
    let mut csv = BufWriter::new(OpenOptions::new().append(true).open(&monitors)?);
    let mut io_error: Option<ExperimentError> = None;
    let mut last_saved = state.step;
    let mut stopped = false;
    let stop = cfg.stop_after_steps;
    let result = solver.advance(state, cfg.horizon(), |s| {
        let mut go = || -> Result<(), ExperimentError> {
            writeln!(csv, "{}", s.last.csv_row())?;
            if s.step % every == 0 {
                csv.flush()?;
                csv.get_ref().sync_data()?;
                save_checkpoint(dir, s)?;
                last_saved = s.step;
            }
            Ok(())
        };
        if let Err(e) = go() {
            io_error = Some(e);
            return false;
        }
        if stop.is_some_and(|k| s.step >= k) {
            stopped = true;
            return false;
        }
        true
    });
    csv.flush()?;
    drop(csv);
    if let Some(e) = io_error {
        return Err(e);
    }
    let (state, status, divergence) = match result {
        Ok(s) if stopped => (s, RunStatus::Stopped, None),
        Ok(s) => (s, RunStatus::Completed, None),
        Err(SolverError::StepDiverged { t, step, reason, last }) => {
            (*last, RunStatus::Diverged, Some(format!("step {step} at t = {t}: {reason}")))
        }
        Err(e) => return Err(e.into()),
    };
    if status == RunStatus::Completed && state.step != last_saved {
        save_checkpoint(dir, &state)?;
    }
    let summary = summarize(cfg, &solver, &state, status, divergence, &read_monitors(&monitors)?);
    let json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    write_atomic(&dir.join(SUMMARY_FILE), &json)?;
    Ok(summary)
}

fn load_resolved(dir: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = fs::read_to_string(dir.join(CONFIG_FILE))
        .map_err(|e| ExperimentError::Resume(format!("{CONFIG_FILE}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| ExperimentError::Resume(format!("{CONFIG_FILE}: {e}")))
}

fn summarize(
    cfg: &ExperimentConfig,
    solver: &Solver,
    state: &SolverState,
    status: RunStatus,
    divergence: Option<String>,
    rows: &[MonitorSample],
) -> RunSummary {
    let tg = solver.settings().monitors;
    let finite = rows.iter().all(|r| {
        let v = r.values();
        let on = [true, true, true, tg.l4, tg.l4, true, true, tg.phi_psi, tg.phi_psi, tg.blowup, tg.sobolev];
        v.iter().zip(on).all(|(x, o)| !o || x.is_finite())
    });
    let max_res = rows
        .iter()
        .map(|r| r.conservation_residual.abs())
        .fold(0.0, f64::max);
    let blowup = state.accumulators.get(ACC_BLOWUP).map(|&integral| {
        let last_increment = match rows {
            [.., a, b] => 0.5 * (b.t - a.t) * (a.blowup_integrand + b.blowup_integrand),
            _ => 0.0,
        };
        BlowupReport { integral, last_increment }
    });
    RunSummary {
        status,
        steps: state.step,
        t_final: state.t,
        horizon: cfg.horizon(),
        dt: state.dt,
        c1: solver.dissipation_constant(),
        terminal: state.last.clone(),
        sup_besov_32: state.sup_besov_32,
        accumulators: state.accumulators.clone(),
        monitors_finite: finite,
        max_abs_conservation_residual: max_res,
        smallness: cfg
            .smallness_eps
            .map(|eps| smallness_monitor(state, solver.params(), eps, solver.dissipation_constant())),
        condition_functional: solver.condition_functional(state),
        blowup,
        divergence,
    }
}

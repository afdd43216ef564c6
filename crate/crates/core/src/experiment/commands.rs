use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::lab::{run_suite, InequalityVerdict, SuiteOptions};
use crate::solver::{stability_probe, StabilityReport};

use super::config::{load_config, ExperimentConfig, ExperimentKind, InitialData};
use super::plot::plot_run;
use super::run::{run_solve, RunStatus, RunSummary, CONFIG_FILE, SUMMARY_FILE};
use super::sweep::{sweep_smallness, SweepResult};
use super::ExperimentError;

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "LLB_OUT_DIR";
pub const VERDICTS_FILE: &str = "verdicts.jsonl";
pub const STABILITY_CSV: &str = "stability.csv";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Verify,
    SweepSmallness,
    BlowupWatch,
    Stability,
    Plot,
}

impl Command {
    fn kind(self) -> Option<ExperimentKind> {
        match self {
            Command::Solve => Some(ExperimentKind::Solve),
            Command::Verify => Some(ExperimentKind::Verify),
            Command::SweepSmallness => Some(ExperimentKind::SweepSmallness),
            Command::BlowupWatch => Some(ExperimentKind::BlowupWatch),
            Command::Stability => Some(ExperimentKind::Stability),
            Command::Plot => None,
        }
    }
}

/// One command-line call.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub resume: bool,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub directory: PathBuf,
    pub message: String,
}

/// `--out`, then the config's `output`, then `$LLB_OUT_DIR/<config stem>`,
/// then `llb-runs/<config stem>`.
pub fn output_dir(inv: &Invocation, cfg: &ExperimentConfig) -> PathBuf {
    if let Some(o) = &inv.out {
        return o.clone();
    }
    if let Some(o) = &cfg.output {
        return o.clone();
    }
    let stem = inv
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    let root = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("llb-runs"));
    root.join(stem)
}

pub fn execute(inv: &Invocation) -> Result<Outcome, ExperimentError> {
    let mut cfg = load_config(&inv.config)?;
    if let Some(seed) = inv.seed {
        cfg.seed = seed;
    }
    let dir = output_dir(inv, &cfg);
    if let Some(kind) = inv.command.kind() {
        if kind != cfg.kind {
            return Err(ExperimentError::config(
                "kind",
                format!("config is of kind {:?} but the command is {:?}", cfg.kind, inv.command),
            ));
        }
    }
    let done = |code: i32, message: String| Outcome { exit_code: code, directory: dir.clone(), message };
    match inv.command {
        Command::Solve | Command::BlowupWatch => {
            let s = if inv.command == Command::Solve {
                cmd_solve(&cfg, &dir, inv.resume)?
            } else {
                cmd_blowup_watch(&cfg, &dir, inv.resume)?
            };
            let code = match s.status {
                RunStatus::Diverged => 2,
                _ => 0,
            };
            Ok(done(code, format!("{:?} at t = {} after {} steps", s.status, s.t_final, s.steps)))
        }
        Command::Verify => {
            let v = cmd_verify(&cfg, &dir)?;
            let failed: Vec<&str> = v.iter().filter(|x| !x.accepted()).map(|x| x.name.as_str()).collect();
            let code = if failed.is_empty() { 0 } else { 2 };
            Ok(done(code, format!("{} verdicts, failed: {:?}", v.len(), failed)))
        }
        Command::SweepSmallness => {
            let workers = inv
                .workers
                .or(cfg.sweep.as_ref().and_then(|s| s.workers))
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let r = cmd_sweep_smallness(&cfg, &dir, workers)?;
            let classes: Vec<_> = r.points.iter().map(|p| p.classification).collect();
            Ok(done(0, format!("classifications: {classes:?}")))
        }
        Command::Stability => {
            let r = cmd_stability(&cfg, &dir)?;
            let code = if r.within_bound { 0 } else { 2 };
            Ok(done(code, format!("max ratio {:e}, bound {:e}", r.max_ratio, r.bound)))
        }
        Command::Plot => {
            let files = cmd_plot(&dir)?;
            Ok(done(0, format!("wrote {} plots", files.len())))
        }
    }
}

pub fn cmd_solve(cfg: &ExperimentConfig, dir: &Path, resume: bool) -> Result<RunSummary, ExperimentError> {
    let u0 = cfg.initial_field()?;
    run_solve(cfg, &u0, dir, resume)
}

/// A solve with the blow-up monitor forced on.
pub fn cmd_blowup_watch(cfg: &ExperimentConfig, dir: &Path, resume: bool) -> Result<RunSummary, ExperimentError> {
    let mut c = cfg.clone();
    c.solver.monitors.blowup = true;
    cmd_solve(&c, dir, resume)
}

/// Writes one JSON verdict per line to `verdicts.jsonl`.
pub fn cmd_verify(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<InequalityVerdict>, ExperimentError> {
    let suite = cfg.suite.as_ref().expect("validated");
    let opts = SuiteOptions { n: cfg.grid.n, samples: suite.samples, seed: cfg.seed, doubling: suite.doubling };
    let verdicts = run_suite(&suite.name, &opts)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_vec_pretty(cfg).expect("config serializes"))?;
    let mut f = fs::File::create(dir.join(VERDICTS_FILE))?;
    for v in &verdicts {
        writeln!(f, "{}", v.to_json_line())?;
    }
    Ok(verdicts)
}

pub fn cmd_sweep_smallness(cfg: &ExperimentConfig, dir: &Path, workers: usize) -> Result<SweepResult, ExperimentError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_vec_pretty(cfg).expect("config serializes"))?;
    sweep_smallness(cfg, dir, workers)
}

pub fn cmd_stability(cfg: &ExperimentConfig, dir: &Path) -> Result<StabilityReport, ExperimentError> {
    let st = cfg.stability.as_ref().expect("validated");
    let grid = cfg.grid.build()?;
    let u0 = cfg.initial_field()?;
    let direction = st
        .direction
        .clone()
        .unwrap_or(InitialData::RandomBand { j_lo: 0, j_hi: 1, amplitude: 1.0, seed: None })
        .build(grid, crate::lab::splitmix(cfg.seed))?;
    let r = stability_probe(&u0, &direction, st.scale, cfg.horizon(), cfg.params(), &cfg.solver)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CONFIG_FILE), serde_json::to_vec_pretty(cfg).expect("config serializes"))?;
    let mut csv = String::from("t,ratio\n");
    for (t, q) in r.times.iter().zip(&r.ratios) {
        csv.push_str(&format!("{t:.16e},{q:.16e}\n"));
    }
    fs::write(dir.join(STABILITY_CSV), csv)?;
    fs::write(dir.join(SUMMARY_FILE), serde_json::to_vec_pretty(&r).expect("report serializes"))?;
    Ok(r)
}

pub fn cmd_plot(dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    plot_run(dir)
}

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::lab::{FieldEnsembleSpec, Spectrum};
use crate::littlewood_paley::{besov_norm, BesovParams, DyadicPartition};
use crate::solver::{LlbParams, SolverSettings};
use crate::spectral::{forward_transform, read_checkpoint, Grid, PhysicalField, SpectralField};

use super::ExperimentError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Solve,
    Verify,
    SweepSmallness,
    BlowupWatch,
    Stability,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default = "two_pi")]
    pub box_length: f64,
}

fn two_pi() -> f64 {
    2.0 * PI
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, ExperimentError> {
        Grid::new(self.n, self.box_length).map_err(|e| ExperimentError::config("grid", e.to_string()))
    }
}

/// Named initial profiles; `amplitude` is a peak value except for
/// `random-band`, where it is the root-mean-square value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude · cos(k·x + phase) e_component`.
    SingleMode {
        k: [i64; 3],
        amplitude: f64,
        #[serde(default)]
        component: usize,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude · (cos(k₁·x) e_{c₁} + cos(k₂·x) e_{c₂})`.
    TwoMode {
        k: [[i64; 3]; 2],
        amplitude: f64,
        #[serde(default = "two_mode_components")]
        components: [usize; 2],
    },
    /// Periodized Gaussian centred in the box, along `e_component`.
    GaussianBump {
        width: f64,
        amplitude: f64,
        #[serde(default)]
        component: usize,
    },
    /// Seed defaults to the run seed.
    RandomBand {
        j_lo: i32,
        j_hi: i32,
        amplitude: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Constant {
        value: [f64; 3],
    },
    Checkpoint {
        path: PathBuf,
    },
}

fn two_mode_components() -> [usize; 2] {
    [1, 2]
}

impl InitialData {
    pub fn build(&self, grid: Grid, run_seed: u64) -> Result<SpectralField, ExperimentError> {
        let bad = |m: String| ExperimentError::config("initial", m);
        match self {
            InitialData::SingleMode { k, amplitude, component, phase } => {
                SpectralField::with_mode(grid, *component, *k, *amplitude, *phase).map_err(|e| bad(e.to_string()))
            }
            InitialData::TwoMode { k, amplitude, components } => {
                let a = SpectralField::with_mode(grid, components[0], k[0], *amplitude, 0.0)
                    .map_err(|e| bad(e.to_string()))?;
                let b = SpectralField::with_mode(grid, components[1], k[1], *amplitude, 0.0)
                    .map_err(|e| bad(e.to_string()))?;
                Ok(&a + &b)
            }
            InitialData::GaussianBump { width, amplitude, component } => {
                if !(*width > 0.0) || *component > 2 {
                    return Err(bad("gaussian-bump needs width > 0 and component in 0..3".into()));
                }
                let l = grid.box_length();
                let c = 0.5 * l;
                let f = PhysicalField::from_fn(grid, |x| {
                    let mut r2 = 0.0;
                    for xi in x {
                        let d = (xi - c).rem_euclid(l);
                        let d = d.min(l - d);
                        r2 += d * d;
                    }
                    let mut v = [0.0; 3];
                    v[*component] = amplitude * (-0.5 * r2 / (width * width)).exp();
                    v
                })
                .map_err(|e| bad(e.to_string()))?;
                Ok(forward_transform(&f))
            }
            InitialData::RandomBand { j_lo, j_hi, amplitude, seed } => {
                let p = DyadicPartition::build(grid).map_err(|e| bad(e.to_string()))?;
                let seed = seed.unwrap_or(run_seed);
                let spec = FieldEnsembleSpec::new(1, Spectrum::Band { j_lo: *j_lo, j_hi: *j_hi }, *amplitude, seed);
                spec.validate(&p).map_err(|e| bad(e.to_string()))?;
                Ok(spec.sample_from_seed(&p, seed))
            }
            InitialData::Constant { value } => Ok(SpectralField::constant(grid, *value)),
            InitialData::Checkpoint { path } => {
                let (f, _) = read_checkpoint(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
                if f.grid() != &grid {
                    return Err(bad("checkpoint grid differs from the configured grid".into()));
                }
                if !f.is_real() {
                    return Err(bad("checkpoint field is not real".into()));
                }
                Ok(f)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "yes")]
    pub doubling: bool,
}

fn default_samples() -> usize {
    200
}
fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Target values of `‖u₀‖_{Ḃ^{3/2}_{2,1}}`; the initial profile is rescaled to each.
    pub amplitudes: Vec<f64>,
    /// Smallness threshold per point, as a multiple of its amplitude.
    #[serde(default = "default_eps_factor")]
    pub eps_factor: f64,
    #[serde(default)]
    pub workers: Option<usize>,
}

fn default_eps_factor() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    /// `‖δu(0)‖_{Ḃ^{3/2}_{2,1}}`.
    pub scale: f64,
    /// Shape of the perturbation; a random band field from the run seed when absent.
    #[serde(default)]
    pub direction: Option<InitialData>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: GridSpec,
    #[serde(default)]
    pub params: Option<LlbParams>,
    #[serde(default)]
    pub initial: Option<InitialData>,
    /// Rescales the initial data to this `Ḃ^{3/2}_{2,1}` norm.
    #[serde(default)]
    pub initial_besov32: Option<f64>,
    #[serde(default)]
    pub horizon: Option<f64>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// `ε` of the smallness monitor reported in `summary.json`.
    #[serde(default)]
    pub smallness_eps: Option<f64>,
    #[serde(default)]
    pub checkpoint_every: Option<u64>,
    /// Stops a run after this many steps, as an interruption would.
    #[serde(default)]
    pub stop_after_steps: Option<u64>,
    #[serde(default)]
    pub suite: Option<SuiteConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub stability: Option<StabilityConfig>,
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ExperimentError::config(&path, e.into_inner().to_string())
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::config("<file>", format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let missing = |k: &str| Err(ExperimentError::config(k, format!("required for kind {:?}", self.kind)));
        self.grid.build()?;
        let runs = matches!(
            self.kind,
            ExperimentKind::Solve
                | ExperimentKind::SweepSmallness
                | ExperimentKind::BlowupWatch
                | ExperimentKind::Stability
        );
        if runs {
            let Some(params) = &self.params else { return missing("params") };
            params.validate().map_err(|e| ExperimentError::config("params", e.to_string()))?;
            if self.initial.is_none() {
                return missing("initial");
            }
            match self.horizon {
                Some(t) if t > 0.0 && t.is_finite() => {}
                Some(_) => return Err(ExperimentError::config("horizon", "must be positive".into())),
                None => return missing("horizon"),
            }
            if let Some(dt) = self.solver.dt {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(ExperimentError::config("solver.dt", "must be positive".into()));
                }
            }
        }
        if let Some(b) = self.initial_besov32 {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(ExperimentError::config("initial_besov32", "must be nonnegative".into()));
            }
        }
        if let Some(e) = self.smallness_eps {
            if !(e > 0.0) {
                return Err(ExperimentError::config("smallness_eps", "must be positive".into()));
            }
        }
        if self.checkpoint_every == Some(0) {
            return Err(ExperimentError::config("checkpoint_every", "must be positive".into()));
        }
        match self.kind {
            ExperimentKind::Verify => {
                let Some(s) = &self.suite else { return missing("suite") };
                let known = s.name == "all" || crate::lab::SUITE_NAMES.contains(&s.name.as_str());
                if !known {
                    return Err(ExperimentError::config(
                        "suite.name",
                        format!(
                            "unknown suite {:?}; valid: all, {}",
                            s.name,
                            crate::lab::SUITE_NAMES.join(", ")
                        ),
                    ));
                }
                if s.samples == 0 {
                    return Err(ExperimentError::config("suite.samples", "must be positive".into()));
                }
            }
            ExperimentKind::SweepSmallness => {
                let Some(s) = &self.sweep else { return missing("sweep") };
                let a = &s.amplitudes;
                if a.len() < 3 {
                    return Err(ExperimentError::config("sweep.amplitudes", "needs at least 3 values".into()));
                }
                if a.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                    return Err(ExperimentError::config("sweep.amplitudes", "values must be positive".into()));
                }
                if a.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ExperimentError::config(
                        "sweep.amplitudes",
                        "values must be strictly increasing".into(),
                    ));
                }
                if !(s.eps_factor > 0.0) {
                    return Err(ExperimentError::config("sweep.eps_factor", "must be positive".into()));
                }
                if s.workers == Some(0) {
                    return Err(ExperimentError::config("sweep.workers", "must be positive".into()));
                }
            }
            ExperimentKind::Stability => {
                let Some(s) = &self.stability else { return missing("stability") };
                if !(s.scale > 0.0 && s.scale.is_finite()) {
                    return Err(ExperimentError::config("stability.scale", "must be positive".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub(crate) fn params(&self) -> &LlbParams {
        self.params.as_ref().expect("validated")
    }

    pub(crate) fn horizon(&self) -> f64 {
        self.horizon.expect("validated")
    }

    /// Initial data with the optional `Ḃ^{3/2}_{2,1}` normalization applied.
    pub fn initial_field(&self) -> Result<SpectralField, ExperimentError> {
        let grid = self.grid.build()?;
        let init = self
            .initial
            .as_ref()
            .ok_or_else(|| ExperimentError::config("initial", "missing".into()))?;
        let u = init.build(grid, self.seed)?;
        match self.initial_besov32 {
            Some(target) => rescale_besov32(&u, target),
            None => Ok(u),
        }
    }
}

pub(crate) fn rescale_besov32(u: &SpectralField, target: f64) -> Result<SpectralField, ExperimentError> {
    let p = DyadicPartition::build(*u.grid()).map_err(|e| ExperimentError::config("grid", e.to_string()))?;
    let b = besov_norm(u, BesovParams::homogeneous(1.5, 2.0, 1.0), &p)
        .map_err(|e| ExperimentError::config("initial", e.to_string()))?
        .value;
    if b == 0.0 {
        if target == 0.0 {
            return Ok(u.clone());
        }
        return Err(ExperimentError::config("initial_besov32", "initial data has zero norm".into()));
    }
    Ok(u.scale(target / b))
}

//! Randomized checks of the harmonic-analysis inequalities on ensembles of
//! structured random fields.
//!
//! Each verifier draws `count` samples, evaluates both sides per sample and
//! reports the extreme ratio as the fitted constant. With doubling enabled
//! the ensemble is evaluated at `2 * count` as well; sample `i` is the same
//! field in both runs, so the smaller ensemble is a prefix of the larger.

mod ensemble;
mod heat;
pub mod ratios;
mod suite;
mod verdict;

use serde_json::json;
use thiserror::Error;

use crate::littlewood_paley::{DyadicPartition, LpError};
use crate::spectral::{Grid, SpectralError, SpectralField};

pub use ensemble::{sample_seed, splitmix, FieldEnsembleSpec, Spectrum};
pub use heat::heat_smoothing_sides;
pub use suite::{run_suite, SuiteOptions, SUITE_NAMES};
pub use verdict::{
    CrossJCheck, DoublingCheck, InequalityVerdict, Statistic, CROSS_J_FACTOR, DOUBLING_TOLERANCE,
};

use verdict::{build_verdict, merge_cross_j};

/// Regeneration attempts per sample before giving up.
pub const MAX_ATTEMPTS: u32 = 8;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sample {index} of {name} stayed degenerate after {attempts} attempts")]
    DegenerateSample { name: String, index: usize, attempts: u32 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Verifier context: the grid partition and the doubling switch.
#[derive(Clone, Debug)]
pub struct Lab {
    partition: DyadicPartition,
    doubling: bool,
}

impl Lab {
    pub fn new(grid: Grid) -> Result<Self, LabError> {
        Ok(Lab { partition: DyadicPartition::build(grid)?, doubling: false })
    }

    pub fn with_doubling(mut self, on: bool) -> Self {
        self.doubling = on;
        self
    }

    pub fn partition(&self) -> &DyadicPartition {
        &self.partition
    }

    /// Dyadic indices used by the cross-`j` checks.
    pub fn interior_indices(&self) -> std::ops::RangeInclusive<i32> {
        self.partition.j_min() + 1..=self.partition.j_max() - 1
    }

    fn collect(
        &self,
        name: &str,
        specs: &[&FieldEnsembleSpec],
        mut eval: impl FnMut(&[SpectralField]) -> Result<Option<f64>, LabError>,
    ) -> Result<Vec<(f64, u64)>, LabError> {
        for s in specs {
            s.validate(&self.partition)?;
        }
        let count = specs[0].count;
        let total = if self.doubling { 2 * count } else { count };
        let mut out = Vec::with_capacity(total);
        for i in 0..total {
            let mut done = None;
            for attempt in 0..MAX_ATTEMPTS {
                let mut fields = Vec::with_capacity(specs.len());
                let mut first_seed = 0;
                for (q, s) in specs.iter().enumerate() {
                    let (f, seed) = s.sample(&self.partition, i, attempt);
                    if q == 0 {
                        first_seed = seed;
                    }
                    fields.push(f);
                }
                if let Some(r) = eval(&fields)? {
                    done = Some((r, first_seed));
                    break;
                }
            }
            match done {
                Some(x) => out.push(x),
                None => {
                    return Err(LabError::DegenerateSample {
                        name: name.to_string(),
                        index: i,
                        attempts: MAX_ATTEMPTS,
                    })
                }
            }
        }
        Ok(out)
    }

    fn verdict(
        &self,
        name: &str,
        specs: &[&FieldEnsembleSpec],
        stat: Statistic,
        params: serde_json::Value,
        eval: impl FnMut(&[SpectralField]) -> Result<Option<f64>, LabError>,
    ) -> Result<InequalityVerdict, LabError> {
        let ratios = self.collect(name, specs, eval)?;
        Ok(build_verdict(
            name,
            specs[0].count,
            &ratios,
            stat,
            params,
            specs.iter().map(|s| (*s).clone()).collect(),
        ))
    }

    /// Lower-bound constant `c0` of the Bernstein-type inequality on block `j`.
    pub fn verify_bernstein(
        &self,
        spec: &FieldEnsembleSpec,
        exponent: f64,
        j: i32,
    ) -> Result<InequalityVerdict, LabError> {
        let p = &self.partition;
        p.check_index(j, p.j_max())?;
        self.verdict(
            "bernstein",
            &[spec],
            Statistic::Min,
            json!({ "p": exponent, "j": j }),
            |f| ratios::bernstein_constant(&f[0], exponent, j, p),
        )
    }

    /// [`verify_bernstein`](Self::verify_bernstein) on single-block ensembles for
    /// every interior `j`, with the cross-`j` spread.
    pub fn verify_bernstein_across_j(
        &self,
        spec: &FieldEnsembleSpec,
        exponent: f64,
    ) -> Result<InequalityVerdict, LabError> {
        let mut per_j = Vec::new();
        for j in self.interior_indices() {
            let sj = spec.with_spectrum(Spectrum::SingleBlock { j });
            per_j.push((j, self.verify_bernstein(&sj, exponent, j)?));
        }
        Ok(merge_cross_j("bernstein", per_j))
    }

    pub fn verify_interpolation(
        &self,
        spec: &FieldEnsembleSpec,
        s1: f64,
        s2: f64,
        theta: f64,
        exponent: f64,
        r: f64,
    ) -> Result<InequalityVerdict, LabError> {
        if !(s1 < s2 && theta > 0.0 && theta < 1.0) {
            return Err(LabError::InvalidArgument(format!(
                "interpolation needs s1 < s2 and theta in (0, 1), got s1={s1}, s2={s2}, theta={theta}"
            )));
        }
        let p = &self.partition;
        self.verdict(
            "interpolation",
            &[spec],
            Statistic::Max,
            json!({ "s1": s1, "s2": s2, "theta": theta, "p": exponent, "r": r }),
            |f| ratios::interpolation_ratio(&f[0], s1, s2, theta, exponent, r, p),
        )
    }

    pub fn verify_product(
        &self,
        spec_u: &FieldEnsembleSpec,
        spec_v: &FieldEnsembleSpec,
        s1: f64,
        s2: f64,
        exponent: f64,
    ) -> Result<InequalityVerdict, LabError> {
        let p = &self.partition;
        self.verdict(
            "product",
            &[spec_u, spec_v],
            Statistic::Max,
            json!({ "s1": s1, "s2": s2, "p": exponent }),
            |f| ratios::product_ratio(&f[0], &f[1], s1, s2, exponent, p),
        )
    }

    pub fn verify_algebra(
        &self,
        spec_f: &FieldEnsembleSpec,
        spec_g: &FieldEnsembleSpec,
        s: f64,
        exponent: f64,
        r: f64,
    ) -> Result<InequalityVerdict, LabError> {
        let p = &self.partition;
        self.verdict(
            "algebra",
            &[spec_f, spec_g],
            Statistic::Max,
            json!({ "s": s, "p": exponent, "r": r }),
            |f| ratios::algebra_ratio(&f[0], &f[1], s, exponent, r, p),
        )
    }

    pub fn verify_commutator_basic(
        &self,
        spec_a: &FieldEnsembleSpec,
        spec_b: &FieldEnsembleSpec,
        j: i32,
        pqr: (f64, f64, f64),
    ) -> Result<InequalityVerdict, LabError> {
        let p = &self.partition;
        p.check_index(j, p.j_max())?;
        self.verdict(
            "commutator-basic",
            &[spec_a, spec_b],
            Statistic::Max,
            json!({ "j": j, "p": pqr.0, "q": pqr.1, "r": pqr.2 }),
            |f| ratios::commutator_basic_ratio(&f[0], &f[1], j, pqr, p),
        )
    }

    pub fn verify_commutator_basic_across_j(
        &self,
        spec_a: &FieldEnsembleSpec,
        spec_b: &FieldEnsembleSpec,
        pqr: (f64, f64, f64),
    ) -> Result<InequalityVerdict, LabError> {
        let mut per_j = Vec::new();
        for j in self.interior_indices() {
            per_j.push((j, self.verify_commutator_basic(spec_a, spec_b, j, pqr)?));
        }
        Ok(merge_cross_j("commutator-basic", per_j))
    }

    pub fn verify_commutator_lemma4(
        &self,
        spec_a: &FieldEnsembleSpec,
        spec_b: &FieldEnsembleSpec,
        s: f64,
        rho: f64,
    ) -> Result<InequalityVerdict, LabError> {
        let p = &self.partition;
        self.verdict(
            "commutator-lemma",
            &[spec_a, spec_b],
            Statistic::Max,
            json!({ "s": s, "rho": rho }),
            |f| ratios::commutator_lemma_ratio(&f[0], &f[1], s, rho, p),
        )
    }

    pub fn verify_moser_commutator(
        &self,
        spec_f: &FieldEnsembleSpec,
        spec_g: &FieldEnsembleSpec,
        m: u32,
        alpha: [u32; 3],
    ) -> Result<InequalityVerdict, LabError> {
        self.verdict(
            "moser",
            &[spec_f, spec_g],
            Statistic::Max,
            json!({ "m": m, "alpha": alpha }),
            |f| ratios::moser_ratio(&f[0], &f[1], m, alpha),
        )
    }

    /// Fits `‖|u|²u‖_{Ḃ^s_{2,1}} / ‖u‖_{Ḃ^s_{2,1}} <= C ‖u‖²_∞`.
    pub fn verify_composition(
        &self,
        spec: &FieldEnsembleSpec,
        s: f64,
    ) -> Result<InequalityVerdict, LabError> {
        if s <= 0.0 {
            return Err(LabError::InvalidArgument("composition needs s > 0".into()));
        }
        let p = &self.partition;
        self.verdict(
            "composition",
            &[spec],
            Statistic::Max,
            json!({ "s": s, "F": "|u|^2 u" }),
            |f| {
                Ok(ratios::composition_ratio(&f[0], s, p)?
                    .and_then(|(r, sup)| (sup * sup >= ratios::DEGENERATE_THRESHOLD).then(|| r / (sup * sup))))
            },
        )
    }

    /// `‖e^{tΔ}u0‖_{L^m_T Ḃ^{s+2+2/m}_{2,1}} <= C ‖u0‖_{Ḃ^{s+2}_{2,1}}`.
    pub fn verify_heat_smoothing(
        &self,
        spec: &FieldEnsembleSpec,
        m: f64,
        s: f64,
        horizon: f64,
    ) -> Result<InequalityVerdict, LabError> {
        if !(m >= 1.0 && horizon > 0.0) {
            return Err(LabError::InvalidArgument(format!(
                "heat smoothing needs m >= 1 and a positive horizon, got m={m}, T={horizon}"
            )));
        }
        let p = &self.partition;
        self.verdict(
            "heat-smoothing",
            &[spec],
            Statistic::Max,
            json!({ "m": m, "s": s, "T": horizon }),
            |f| {
                let (lhs, rhs) = heat_smoothing_sides(&f[0], m, s, horizon, p);
                Ok((rhs >= ratios::DEGENERATE_THRESHOLD).then(|| lhs / rhs))
            },
        )
    }

    /// Bracket `[c1, c2]` of `‖∇f‖_{Ḃ^s_{2,1}} / ‖f‖_{Ḃ^{s+1}_{2,1}}` as a
    /// (lower, upper) pair of verdicts.
    pub fn verify_derivative_equivalence(
        &self,
        spec: &FieldEnsembleSpec,
        s: f64,
    ) -> Result<(InequalityVerdict, InequalityVerdict), LabError> {
        let p = &self.partition;
        let params = json!({ "s": s });
        let ratios = self.collect("derivative-equivalence", &[spec], |f| {
            ratios::derivative_equivalence_ratio(&f[0], s, p)
        })?;
        let specs = vec![spec.clone()];
        Ok((
            build_verdict("derivative-lower", spec.count, &ratios, Statistic::Min, params.clone(), specs.clone()),
            build_verdict("derivative-upper", spec.count, &ratios, Statistic::Max, params, specs),
        ))
    }

    pub fn verify_embedding(
        &self,
        spec: &FieldEnsembleSpec,
        s: f64,
        exponent: f64,
    ) -> Result<InequalityVerdict, LabError> {
        if exponent <= 2.0 {
            return Err(LabError::InvalidArgument("embedding check needs p > 2".into()));
        }
        let p = &self.partition;
        self.verdict(
            "embedding",
            &[spec],
            Statistic::Max,
            json!({ "s": s, "p": exponent }),
            |f| ratios::embedding_ratio(&f[0], s, exponent, p),
        )
    }
}

use serde::{Deserialize, Serialize};

use super::ensemble::FieldEnsembleSpec;

/// Whether the fitted constant is the largest or smallest sample ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Max,
    Min,
}

/// Fitted constant over the doubled ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingCheck {
    pub samples: usize,
    pub fitted_constant: f64,
    pub relative_change: f64,
    pub stable: bool,
}

/// Fitted constants per dyadic index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossJCheck {
    pub per_j: Vec<(i32, f64)>,
    pub spread: f64,
    pub stable: bool,
}

/// Largest accepted relative change of a fitted constant under doubling.
pub const DOUBLING_TOLERANCE: f64 = 0.25;
/// Largest accepted max/min ratio of fitted constants across `j`.
pub const CROSS_J_FACTOR: f64 = 10.0;

/// Outcome of one randomized inequality check.
///
/// `passed` holds exactly when every sample ratio and the fitted constant are
/// finite (and, for lower-bound constants, positive). The doubling and
/// cross-`j` checks are reported separately and combined in [`accepted`](Self::accepted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub name: String,
    pub samples: usize,
    pub fitted_constant: f64,
    pub worst_sample_seed: u64,
    pub passed: bool,
    pub statistic: Statistic,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub doubling: Option<DoublingCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_j: Option<CrossJCheck>,
    pub params: serde_json::Value,
    pub spec: Vec<FieldEnsembleSpec>,
}

impl InequalityVerdict {
    pub fn accepted(&self) -> bool {
        self.passed
            && self.doubling.as_ref().is_none_or(|d| d.stable)
            && self.cross_j.as_ref().is_none_or(|c| c.stable)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}

/// Fitted constant and the seed of the sample attaining it.
pub(crate) fn fit(ratios: &[(f64, u64)], stat: Statistic) -> (f64, u64, bool) {
    let mut best = match stat {
        Statistic::Max => f64::NEG_INFINITY,
        Statistic::Min => f64::INFINITY,
    };
    let mut seed = 0;
    let mut finite = true;
    for &(r, s) in ratios {
        if !r.is_finite() {
            finite = false;
        }
        let better = match stat {
            Statistic::Max => r > best,
            Statistic::Min => r < best,
        };
        if better || r.is_nan() {
            best = r;
            seed = s;
        }
    }
    let ok = finite && best.is_finite() && (stat == Statistic::Max || best > 0.0);
    (best, seed, ok)
}

pub(crate) fn build_verdict(
    name: &str,
    count: usize,
    ratios: &[(f64, u64)],
    stat: Statistic,
    params: serde_json::Value,
    spec: Vec<FieldEnsembleSpec>,
) -> InequalityVerdict {
    let (fitted, seed, ok) = fit(&ratios[..count], stat);
    let doubling = (ratios.len() > count).then(|| {
        let (f2, _, ok2) = fit(ratios, stat);
        let change = ((f2 - fitted) / fitted).abs();
        DoublingCheck {
            samples: ratios.len(),
            fitted_constant: f2,
            relative_change: change,
            stable: ok2 && change < DOUBLING_TOLERANCE,
        }
    });
    InequalityVerdict {
        name: name.to_string(),
        samples: count,
        fitted_constant: fitted,
        worst_sample_seed: seed,
        passed: ok,
        statistic: stat,
        doubling,
        cross_j: None,
        params,
        spec,
    }
}

/// Merges per-`j` verdicts into one verdict with a cross-`j` check.
pub(crate) fn merge_cross_j(name: &str, per_j: Vec<(i32, InequalityVerdict)>) -> InequalityVerdict {
    assert!(!per_j.is_empty());
    let stat = per_j[0].1.statistic;
    let fitted: Vec<(i32, f64)> = per_j.iter().map(|(j, v)| (*j, v.fitted_constant)).collect();
    let hi = fitted.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = fitted.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    let (j_best, best) = per_j
        .iter()
        .max_by(|a, b| {
            let (x, y) = (a.1.fitted_constant, b.1.fitted_constant);
            match stat {
                Statistic::Max => x.total_cmp(&y),
                Statistic::Min => y.total_cmp(&x),
            }
        })
        .expect("nonempty");
    let doubling = per_j
        .iter()
        .filter_map(|(_, v)| v.doubling.clone())
        .max_by(|a, b| a.relative_change.total_cmp(&b.relative_change));
    let passed = per_j.iter().all(|(_, v)| v.passed);
    InequalityVerdict {
        name: name.to_string(),
        samples: best.samples,
        fitted_constant: best.fitted_constant,
        worst_sample_seed: best.worst_sample_seed,
        passed,
        statistic: stat,
        doubling,
        cross_j: Some(CrossJCheck {
            per_j: fitted,
            spread,
            stable: spread.is_finite() && spread < CROSS_J_FACTOR,
        }),
        params: serde_json::json!({ "worst_j": j_best, "inner": best.params }),
        spec: best.spec.clone(),
    }
}

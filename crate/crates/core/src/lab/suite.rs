use serde::{Deserialize, Serialize};

use crate::spectral::Grid;

use super::ensemble::{splitmix, FieldEnsembleSpec, Spectrum};
use super::verdict::InequalityVerdict;
use super::{Lab, LabError};

/// Named suites accepted by [`run_suite`]; `"all"` runs every one in this order.
pub const SUITE_NAMES: [&str; 11] = [
    "bernstein",
    "interpolation",
    "product",
    "algebra",
    "commutator",
    "commutator-lemma",
    "moser",
    "composition",
    "heat",
    "derivative",
    "embedding",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteOptions {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "yes")]
    pub doubling: bool,
}

fn yes() -> bool {
    true
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { n: 32, samples: 200, seed: 7, doubling: true }
    }
}

/// Runs one named suite (or `"all"`) with the standard parameter choices.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<Vec<InequalityVerdict>, LabError> {
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITE_NAMES {
            out.extend(run_suite(s, opts)?);
        }
        return Ok(out);
    }
    if !SUITE_NAMES.contains(&name) {
        return Err(LabError::InvalidArgument(format!(
            "unknown suite {name:?}; valid: all, {}",
            SUITE_NAMES.join(", ")
        )));
    }
    let grid = Grid::periodic(opts.n).map_err(crate::littlewood_paley::LpError::from)?;
    let lab = Lab::new(grid)?.with_doubling(opts.doubling);
    let n = opts.n as f64;
    let seed_a = opts.seed;
    let seed_b = splitmix(opts.seed ^ 0x0b5e_55ed);
    let power = |alpha: f64, seed: u64| {
        FieldEnsembleSpec::new(opts.samples, Spectrum::PowerLaw { alpha }, 1.0, seed)
    };
    let pair_band = n / 4.0 - 0.5;
    let v = match name {
        "bernstein" => {
            let spec = FieldEnsembleSpec::new(opts.samples, Spectrum::SingleBlock { j: 0 }, 1.0, seed_a);
            vec![lab.verify_bernstein_across_j(&spec, 4.0)?]
        }
        "interpolation" => vec![lab.verify_interpolation(&power(2.0, seed_a), 1.5, 3.5, 0.5, 2.0, 1.0)?],
        "product" => vec![lab.verify_product(
            &power(2.0, seed_a).band_limited(pair_band),
            &power(2.0, seed_b).band_limited(pair_band),
            1.5,
            1.5,
            2.0,
        )?],
        "algebra" => vec![lab.verify_algebra(
            &power(2.0, seed_a).band_limited(pair_band),
            &power(2.0, seed_b).band_limited(pair_band),
            1.5,
            2.0,
            1.0,
        )?],
        "commutator" => vec![lab.verify_commutator_basic_across_j(
            &power(3.0, seed_a),
            &power(1.0, seed_b),
            (f64::INFINITY, 2.0, 2.0),
        )?],
        "commutator-lemma" => vec![lab.verify_commutator_lemma4(
            &power(2.0, seed_a).band_limited(pair_band),
            &power(2.0, seed_b).band_limited(pair_band),
            2.5,
            4.0,
        )?],
        "moser" => vec![lab.verify_moser_commutator(
            &power(2.5, seed_a).band_limited(pair_band),
            &power(2.5, seed_b).band_limited(pair_band),
            2,
            [2, 0, 0],
        )?],
        "composition" => vec![lab.verify_composition(&power(2.0, seed_a).band_limited(n / 6.0 - 0.5), 1.5)?],
        "heat" => vec![lab.verify_heat_smoothing(&power(1.5, seed_a), 1.0, -0.5, 1.0)?],
        "derivative" => {
            let (lo, hi) = lab.verify_derivative_equivalence(&power(2.0, seed_a), 0.5)?;
            vec![lo, hi]
        }
        "embedding" => vec![lab.verify_embedding(&power(2.0, seed_a), 1.5, 4.0)?],
        _ => unreachable!(),
    };
    Ok(v)
}

//! Two runs a `1e-6` perturbation apart; the difference ratio is compared
//! with the exponential of the runs' own Gronwall budget.

use llb::lab::{FieldEnsembleSpec, Spectrum};
use llb::littlewood_paley::DyadicPartition;
use llb::solver::{stability_probe, LlbParams, MonitorToggles, SolverSettings};
use llb::spectral::Grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::periodic(32)?;
    let p = DyadicPartition::build(grid)?;
    let spec = FieldEnsembleSpec::new(1, Spectrum::PowerLaw { alpha: 2.0 }, 0.05, 3).band_limited(4.0);
    let u0 = spec.sample_from_seed(&p, 3);
    let direction = spec.sample_from_seed(&p, 4);
    let settings = SolverSettings {
        dt: Some(0.02),
        monitors: MonitorToggles { l4: false, phi_psi: false, blowup: false, sobolev: false },
        ..Default::default()
    };
    let r = stability_probe(&u0, &direction, 1e-6, 2.0, &LlbParams::new(1.0, 1.0).with_cutoff(4.0), &settings)?;
    for (t, q) in r.times.iter().zip(&r.ratios).step_by(10) {
        println!("t = {t:.2}  |du(t)|/|du(0)| = {q:.8}");
    }
    println!(
        "max ratio {:.8}, Gronwall budget {:.4e}, bound {:.8}, within bound: {}",
        r.max_ratio, r.gronwall_budget, r.bound, r.within_bound
    );
    Ok(())
}

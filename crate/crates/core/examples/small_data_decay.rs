use llb::littlewood_paley::{besov_norm, BesovParams, DyadicPartition};
use llb::solver::{smallness_monitor, LlbParams, Solver, SolverSettings, ACC_BLOWUP};
use llb::spectral::{Grid, SpectralField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::periodic(32)?;
    let p = DyadicPartition::build(grid)?;
    let shape = &SpectralField::with_mode(grid, 1, [1, 0, 0], 1.0, 0.0)? + &SpectralField::with_mode(grid, 2, [0, 1, 1], 0.5, 0.4)?;
    let b0 = besov_norm(&shape, BesovParams::homogeneous(1.5, 2.0, 1.0), &p)?.value;
    let u0 = shape.scale(1e-3 / b0);
    let params = LlbParams::new(1.0, 1.0).with_cutoff(4.0);
    let mut solver = Solver::new(&u0, params.clone(), SolverSettings { dt: Some(0.02), ..Default::default() })?;
    println!("fitted dissipation constant c1 = {:.6}", solver.dissipation_constant());

    let start = solver.initial_state()?;
    let end = solver.advance(start, 5.0, |s| {
        if s.step % 50 == 0 {
            println!(
                "t = {:>5.2}  B32 = {:.6e}  phi = {:.4e}  psi = {:.6}  blow-up integral = {:.6e}",
                s.t, s.last.besov_32, s.last.phi_t, s.last.psi_t, s.accumulators[ACC_BLOWUP]
            );
        }
        true
    })?;
    let report = smallness_monitor(&end, &params, 2e-3, solver.dissipation_constant());
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

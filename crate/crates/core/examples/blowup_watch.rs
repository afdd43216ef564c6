//! Accumulates the continuation integrand for moderate and large data on the
//! full (untruncated) system.

use llb::littlewood_paley::{besov_norm, BesovParams, DyadicPartition};
use llb::solver::{LlbParams, Solver, SolverError, SolverSettings, ACC_BLOWUP};
use llb::spectral::{Grid, SpectralField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::periodic(16)?;
    let p = DyadicPartition::build(grid)?;
    let shape = &(&SpectralField::with_mode(grid, 0, [1, 1, 0], 1.0, 0.0)?
        + &SpectralField::with_mode(grid, 1, [0, 1, 2], 1.0, 0.7)?)
        + &SpectralField::with_mode(grid, 2, [2, 0, 1], 1.0, 1.9)?;
    let b = besov_norm(&shape, BesovParams::homogeneous(1.5, 2.0, 1.0), &p)?.value;
    for size in [0.1, 1.0, 10.0] {
        let u0 = shape.scale(size / b);
        let mut solver = Solver::new(&u0, LlbParams::new(1.0, 1.0), SolverSettings::default())?;
        let mut last_increment = 0.0;
        let mut prev = 0.0;
        let start = solver.initial_state()?;
        let result = solver.advance(start, 1.0, |s| {
            last_increment = s.accumulators[ACC_BLOWUP] - prev;
            prev = s.accumulators[ACC_BLOWUP];
            true
        });
        match result {
            Ok(end) => println!(
                "|u0|_B32 = {size:>5}: dt = {:.2e}, integral {:.6e}, last increment {:.2e}, final B32 {:.4e}",
                end.dt, prev, last_increment, end.last.besov_32
            ),
            Err(SolverError::StepDiverged { t, reason, .. }) => {
                println!("|u0|_B32 = {size:>5}: stopped at t = {t:.4} ({reason}), integral so far {prev:.6e}")
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

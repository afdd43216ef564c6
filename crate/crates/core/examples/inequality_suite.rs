//! Runs every named verifier suite at 32³ and prints the fitted constants.
//!
//! `cargo run --example inequality_suite -- 200` for full-size ensembles.

use std::time::Instant;

use llb::lab::{run_suite, SuiteOptions, SUITE_NAMES};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let opts = SuiteOptions { samples, ..SuiteOptions::default() };
    for name in SUITE_NAMES {
        let t = Instant::now();
        for v in run_suite(name, &opts)? {
            let change = v.doubling.as_ref().map_or(0.0, |d| d.relative_change);
            let spread = v.cross_j.as_ref().map_or(1.0, |c| c.spread);
            println!(
                "{:<18} C = {:<12.5e} ({:?}) doubling change {:>6.3}  cross-j spread {:>6.2}  accepted {}  {:.1}s",
                v.name,
                v.fitted_constant,
                v.statistic,
                change,
                spread,
                v.accepted(),
                t.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}

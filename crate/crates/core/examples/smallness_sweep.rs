//! Drives the `sweep-smallness` experiment through the library API and prints
//! the classification per amplitude. Output goes to a temporary directory.

use llb::experiment::{cmd_sweep_smallness, parse_config};

const CONFIG: &str = r#"{
    "kind": "sweep-smallness",
    "grid": {"n": 16},
    "params": {"kappa": 1, "mu": 1, "cutoff_n": 4},
    "initial": {"profile": "two-mode", "k": [[1, 0, 0], [0, 1, 1]], "amplitude": 1},
    "horizon": 2,
    "solver": {"dt": 0.02},
    "sweep": {"amplitudes": [1e-4, 1e-3, 1e-2, 1e-1, 1]}
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(CONFIG)?;
    let dir = std::env::temp_dir().join(format!("llb-sweep-{}", std::process::id()));
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let r = cmd_sweep_smallness(&cfg, &dir, workers)?;
    for pt in &r.points {
        println!(
            "B32(u0) = {:<8e} {:<22} smallness {} (lhs {:.4e} vs eps {:.1e})  max B32 {:.4e}  blow-up integral {:.4e}",
            pt.amplitude,
            format!("{:?}", pt.classification),
            if pt.smallness_passed { "pass" } else { "fail" },
            pt.smallness_lhs,
            pt.smallness_eps,
            pt.max_besov_32,
            pt.blowup_integral
        );
    }
    println!("smallest amplitude decayed: {}; files in {}", r.smallest_decayed, dir.display());
    Ok(())
}

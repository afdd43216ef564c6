//! Acceptance criteria 1 to 11, one line each.
//!
//! Runs without the libtest harness so every verdict line is printed.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use llb::lab::ratios::bernstein_constant;
use llb::lab::{run_suite, FieldEnsembleSpec, Spectrum, SuiteOptions};
use llb::littlewood_paley::{besov_norm, dyadic_block, sobolev_norm, BesovParams, DyadicPartition, PHI_INNER};
use llb::solver::{
    smallness_monitor, stability_probe, LlbParams, MonitorToggles, Solver, SolverSettings, SolverState, ACC_BLOWUP,
};
use llb::spectral::{
    forward_transform, heat_propagate, inverse_transform, pointwise_cross_with_laplacian, Grid, PhysicalField,
    SpectralField,
};

// Criterion 1
const PARTITION_TOL: f64 = 1e-12;
const RECONSTRUCTION_TOL: f64 = 1e-12;
const RECONSTRUCTION_FIELDS: usize = 100;
const C1_BUDGET_S: f64 = 30.0;
// Criterion 2
const ORACLE_TOL: f64 = 1e-12;
// Criterion 3
const ORTHOGONALITY_TOL: f64 = 1e-11;
const ORTHOGONALITY_FIELDS: usize = 100;
// Criterion 4
const RESIDUAL_TOL: f64 = 1e-5;
const RESIDUAL_RATIO: (f64, f64) = (3.0, 5.0);
// Criterion 5
const ORDER_RATIO: (f64, f64) = (12.0, 20.0);
// Criterion 6
const FRIEDRICHS_TOL: f64 = 1e-6;
// Criterion 7
const SUITE_SAMPLES: usize = 200;
const SUITE_BUDGET_S: f64 = 600.0;
// Criterion 8
const BERNSTEIN_TOL: f64 = 1e-10;
// Criterion 9
const SMALL_DATA: f64 = 1e-3;
const SMALL_EPS: f64 = 2e-3;
const MONOTONE_TOL: f64 = 1e-10;
const INCREMENT_TOL: f64 = 1e-12;
// Criterion 10
const PERTURBATION: f64 = 1e-6;
const STABILITY_T: f64 = 2.0;
// Criterion 11
const RESUME_TOL: f64 = 1e-12;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn b32(u: &SpectralField, p: &DyadicPartition) -> f64 {
    besov_norm(u, BesovParams::homogeneous(1.5, 2.0, 1.0), p).unwrap().value
}

fn lean() -> MonitorToggles {
    MonitorToggles { l4: true, phi_psi: false, blowup: false, sobolev: false }
}

fn run(u0: &SpectralField, params: &LlbParams, dt: f64, horizon: f64, monitors: MonitorToggles) -> SolverState {
    let settings = SolverSettings { dt: Some(dt), monitors, ..Default::default() };
    Solver::new(u0, params.clone(), settings).unwrap().run(horizon).unwrap()
}

fn criterion_1() -> Check {
    let t0 = Instant::now();
    let grid = Grid::periodic(64).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let residual = p.homogeneous_residual();
    let spec = FieldEnsembleSpec::new(RECONSTRUCTION_FIELDS, Spectrum::PowerLaw { alpha: 1.0 }, 1.0, 101);
    let mut worst = 0.0f64;
    for i in 0..RECONSTRUCTION_FIELDS {
        let (f, _) = spec.sample(&p, i, 0);
        let f = &f + &SpectralField::constant(grid, [0.3, -0.2, 0.1]);
        let mut sum = SpectralField::zeros(grid);
        for j in p.indices() {
            sum = &sum + &dyadic_block(&f, j, &p).unwrap();
        }
        let err = (&sum - &f.without_mean()).l2_norm() / f.l2_norm();
        worst = worst.max(err);
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure(
        residual < PARTITION_TOL && worst < RECONSTRUCTION_TOL && secs < C1_BUDGET_S,
        format!("partition residual {residual:.2e}, worst reconstruction {worst:.2e}, {secs:.1}s"),
    )
}

fn criterion_2() -> Check {
    let grid = Grid::periodic(16).unwrap();
    let k = [2i64, -1, 3];
    let (amp, phase) = (0.7, 0.4);
    let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
    let wave = |x: [f64; 3]| (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2] + phase).cos();
    let phys = PhysicalField::from_fn(grid, |x| [0.0, amp * wave(x), 0.0]).unwrap();
    let f = forward_transform(&phys);
    let c = f.coeff(1, k).unwrap();
    let (re, im) = (amp / 2.0 * phase.cos(), amp / 2.0 * phase.sin());
    let mut worst = ((c.re - re).powi(2) + (c.im - im).powi(2)).sqrt() / (amp / 2.0);
    let rest = f.l2_norm_squared() - 2.0 * c.norm_sqr() * grid.volume();
    worst = worst.max(rest.abs().sqrt() / f.l2_norm());
    let (t, kappa) = (0.03, 1.7);
    for damping in [0.0, kappa] {
        let decayed = inverse_transform(&heat_propagate(&f, t, damping)).unwrap();
        let factor = (-(kk + damping) * t).exp();
        let exact = PhysicalField::from_fn(grid, |x| [0.0, amp * factor * wave(x), 0.0]).unwrap();
        let scale = amp * factor;
        for (a, b) in decayed.values().iter().zip(exact.values()) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    ensure(worst < ORACLE_TOL, format!("worst relative error {worst:.2e}"))
}

fn criterion_3() -> Check {
    let grid = Grid::periodic(32).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let spec = FieldEnsembleSpec::new(ORTHOGONALITY_FIELDS, Spectrum::PowerLaw { alpha: 1.0 }, 1.0, 303)
        .band_limited(8.0);
    let mut worst = 0.0f64;
    for i in 0..ORTHOGONALITY_FIELDS {
        let (u, _) = spec.sample(&p, i, 0);
        let cross = pointwise_cross_with_laplacian(&u).unwrap();
        let h2 = sobolev_norm(&u, 2.0, false).unwrap().value;
        worst = worst.max(cross.inner(&u).abs() / (h2 * u.l2_norm()));
    }
    ensure(worst < ORTHOGONALITY_TOL, format!("worst normalized pairing {worst:.2e}"))
}

fn max_residual(u0: &SpectralField, params: &LlbParams, dt: f64) -> f64 {
    let settings = SolverSettings { dt: Some(dt), monitors: lean(), ..Default::default() };
    let mut solver = Solver::new(u0, params.clone(), settings).unwrap();
    let start = solver.initial_state().unwrap();
    let mut worst = 0.0f64;
    solver
        .advance(start, 1.0, |s| {
            worst = worst.max(s.last.conservation_residual.abs());
            true
        })
        .unwrap();
    worst
}

fn criterion_4() -> Check {
    let grid = Grid::periodic(64).unwrap();
    let modes = [(1, [1, 0, 0], 0.1, 0.0), (2, [0, 1, 1], 0.05, 0.3), (0, [0, 0, 1], 0.05, 1.0)];
    let mut u0 = SpectralField::zeros(grid);
    for (c, k, a, ph) in modes {
        u0 = &u0 + &SpectralField::with_mode(grid, c, k, a, ph).unwrap();
    }
    let params = LlbParams::new(1.0, 1.0).with_cutoff(2.0);
    let coarse = max_residual(&u0, &params, 1e-3);
    let fine = max_residual(&u0, &params, 5e-4);
    let ratio = coarse / fine;
    ensure(
        coarse < RESIDUAL_TOL && (RESIDUAL_RATIO.0..=RESIDUAL_RATIO.1).contains(&ratio),
        format!("max residual {coarse:.3e} at dt 1e-3, {fine:.3e} at dt 5e-4, ratio {ratio:.2}"),
    )
}

fn order_ratios(u0: &SpectralField, params: &LlbParams, horizon: f64, dts: &[f64]) -> Vec<f64> {
    dts.iter()
        .map(|&dt| {
            let reference = run(u0, params, dt / 8.0, horizon, lean()).u;
            let a = (&run(u0, params, dt, horizon, lean()).u - &reference).l2_norm();
            let b = (&run(u0, params, dt / 2.0, horizon, lean()).u - &reference).l2_norm();
            a / b
        })
        .collect()
}

fn criterion_5() -> Check {
    let grid = Grid::periodic(16).unwrap();
    let constant = SpectralField::constant(grid, [0.8, 0.0, 0.0]);
    let r_const = order_ratios(&constant, &LlbParams::new(1.0, 1.0), 1.0, &[0.05, 0.025]);
    let p = DyadicPartition::build(grid).unwrap();
    let band = FieldEnsembleSpec::new(1, Spectrum::PowerLaw { alpha: 1.0 }, 0.5, 11)
        .band_limited(4.0)
        .sample_from_seed(&p, 11);
    let r_band = order_ratios(&band, &LlbParams::new(1.0, 1.0).with_cutoff(4.0), 0.5, &[0.05, 0.025]);
    let ok = r_const.iter().chain(&r_band).all(|r| (ORDER_RATIO.0..=ORDER_RATIO.1).contains(r));
    ensure(ok, format!("constant-data ratios {r_const:.2?}, band-limited ratios {r_band:.2?}"))
}

fn criterion_6() -> Check {
    let grid = Grid::periodic(64).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let u0 = FieldEnsembleSpec::new(1, Spectrum::PowerLaw { alpha: 1.0 }, 1e-2, 5)
        .band_limited(2.0)
        .sample_from_seed(&p, 5);
    let n = 8.0;
    let a = run(&u0, &LlbParams::new(1.0, 1.0).with_cutoff(n), 0.05, 1.0, lean()).u;
    let b = run(&u0, &LlbParams::new(1.0, 1.0).with_cutoff(2.0 * n), 0.05, 1.0, lean()).u;
    let low = |f: &SpectralField| f.map_multiplier(|i| if grid.k_squared(i) <= (n / 2.0).powi(2) { 1.0 } else { 0.0 });
    let (la, lb) = (low(&a), low(&b));
    let rel = (&la - &lb).l2_norm() / lb.l2_norm();
    ensure(rel < FRIEDRICHS_TOL, format!("relative difference on |k| <= 4: {rel:.2e}"))
}

fn criterion_7() -> Check {
    let t0 = Instant::now();
    let opts = SuiteOptions { n: 32, samples: SUITE_SAMPLES, seed: 7, doubling: true };
    let verdicts = run_suite("all", &opts).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.accepted()).map(|v| v.name.as_str()).collect();
    let worst_change = verdicts
        .iter()
        .filter_map(|v| v.doubling.as_ref().map(|d| d.relative_change))
        .fold(0.0f64, f64::max);
    let worst_spread = verdicts.iter().filter_map(|v| v.cross_j.as_ref().map(|c| c.spread)).fold(1.0f64, f64::max);
    ensure(
        failed.is_empty() && secs < SUITE_BUDGET_S,
        format!(
            "{} verdicts, failed {failed:?}, worst doubling change {worst_change:.3}, worst cross-j spread {worst_spread:.2}, {secs:.0}s",
            verdicts.len()
        ),
    )
}

fn criterion_8() -> Check {
    let grid = Grid::periodic(32).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let j = 3;
    let mut worst = 0.0f64;
    let mut last = 0.0;
    for k in [[8, 0, 0], [0, 8, 0], [0, 0, -8]] {
        let u = SpectralField::with_mode(grid, 2, k, 1.3, 0.2).unwrap();
        let got = bernstein_constant(&u, 2.0, j, &p).unwrap().unwrap();
        // Parseval: ∫|∇u|² = |k|²∫|u|², so the ratio is |k|²/(2^j·r₁/p)².
        let k2: f64 = k.iter().map(|x| (*x * *x) as f64).sum();
        let oracle = k2 / (2f64.powi(j) * PHI_INNER / 2.0).powi(2);
        worst = worst.max((got - oracle).abs() / oracle).max((got - 64.0 / 9.0).abs() / (64.0 / 9.0));
        last = got;
    }
    ensure(worst < BERNSTEIN_TOL, format!("sample constant {last:.15}, 64/9 = {:.15}, rel err {worst:.1e}", 64.0 / 9.0))
}

fn criterion_9() -> Check {
    let grid = Grid::periodic(32).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let shape = SpectralField::with_mode(grid, 1, [1, 0, 0], 1.0, 0.0).unwrap();
    let u0 = shape.scale(SMALL_DATA / b32(&shape, &p));
    let params = LlbParams::new(1.0, 1.0).with_cutoff(4.0);
    let settings = SolverSettings { dt: Some(0.02), ..Default::default() };
    let mut solver = Solver::new(&u0, params.clone(), settings).unwrap();
    let start = solver.initial_state().unwrap();
    let mut prev = start.last.besov_32;
    let (mut worst_rise, mut prev_acc, mut last_increment) = (f64::NEG_INFINITY, 0.0, f64::NAN);
    let end = solver
        .advance(start, 10.0, |s| {
            worst_rise = worst_rise.max(s.last.besov_32 - prev);
            prev = s.last.besov_32;
            let acc = s.accumulators[ACC_BLOWUP];
            last_increment = acc - prev_acc;
            prev_acc = acc;
            true
        })
        .map_err(|e| e.to_string())?;
    let report = smallness_monitor(&end, &params, SMALL_EPS, solver.dissipation_constant());
    ensure(
        report.passed && worst_rise <= MONOTONE_TOL && last_increment.abs() < INCREMENT_TOL && end.t >= 10.0 - 1e-9,
        format!(
            "smallness lhs {:.4e} vs eps {SMALL_EPS:e}, worst per-step rise {worst_rise:.2e}, final blow-up increment {last_increment:.2e}, integral {prev_acc:.4e}",
            report.lhs
        ),
    )
}

fn criterion_10() -> Check {
    let grid = Grid::periodic(32).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let spec = FieldEnsembleSpec::new(1, Spectrum::PowerLaw { alpha: 2.0 }, 1e-2, 3).band_limited(4.0);
    let u0 = spec.sample_from_seed(&p, 3);
    let direction = spec.sample_from_seed(&p, 4);
    let params = LlbParams::new(1.0, 1.0).with_cutoff(4.0);
    let settings = SolverSettings { dt: Some(0.02), monitors: lean(), ..Default::default() };
    let r = stability_probe(&u0, &direction, PERTURBATION, STABILITY_T, &params, &settings).map_err(|e| e.to_string())?;
    let t_end = *r.times.last().unwrap();
    ensure(
        r.within_bound && r.max_ratio <= r.bound && (t_end - STABILITY_T).abs() < 1e-9,
        format!("max ratio {:.6}, bound e^G = {:.6} (G = {:.3e}) at T = {t_end}", r.max_ratio, r.bound, r.gronwall_budget),
    )
}

fn llb(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_llb")).args(args).output().unwrap().status.code().unwrap_or(-1)
}

fn read_rows(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn criterion_11() -> Check {
    let tmp = tempfile::tempdir().unwrap();
    let base = r#"{"kind": "solve", "grid": {"n": 16}, "params": {"kappa": 1, "mu": 1, "cutoff_n": 4},
        "initial": {"profile": "random-band", "j_lo": 0, "j_hi": 2, "amplitude": 0.05},
        "horizon": 1, "solver": {"dt": 0.01}, "seed": 42, "smallness_eps": 1EXTRA}"#;
    let full = tmp.path().join("full.json");
    let stop = tmp.path().join("stop.json");
    std::fs::write(&full, base.replace("EXTRA", "")).unwrap();
    std::fs::write(&stop, base.replace("EXTRA", r#", "stop_after_steps": 37"#)).unwrap();
    let dir = |name: &str| tmp.path().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let codes = [
        llb(&["solve", "--config", &s(&full), "--out", &s(&dir("a"))]),
        llb(&["solve", "--config", &s(&full), "--out", &s(&dir("b"))]),
        llb(&["solve", "--config", &s(&stop), "--out", &s(&dir("c"))]),
        llb(&["solve", "--config", &s(&full), "--out", &s(&dir("c")), "--resume"]),
    ];
    let csv = |d: &str| std::fs::read(dir(d).join("monitors.csv")).unwrap();
    let identical = csv("a") == csv("b");
    let (ra, rc) = (read_rows(&dir("a").join("monitors.csv")), read_rows(&dir("c").join("monitors.csv")));
    let mut worst = 0.0f64;
    for (x, y) in ra.iter().zip(&rc) {
        for (u, v) in x.iter().zip(y) {
            if !(u.is_nan() && v.is_nan()) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    ensure(
        codes == [0; 4] && identical && ra.len() == rc.len() && worst <= RESUME_TOL,
        format!("exit codes {codes:?}, rerun byte-identical {identical}, resumed rows {}/{}, worst entry difference {worst:.1e}", rc.len(), ra.len()),
    )
}

fn main() {
    let criteria: [(u32, &str, fn() -> Check); 11] = [
        (1, "partition of unity and reconstruction", criterion_1),
        (2, "transform and heat oracles", criterion_2),
        (3, "cross-term orthogonality", criterion_3),
        (4, "conservation law", criterion_4),
        (5, "integrator order", criterion_5),
        (6, "Friedrichs consistency", criterion_6),
        (7, "inequality suite", criterion_7),
        (8, "Bernstein p=2 oracle", criterion_8),
        (9, "small-data decay", criterion_9),
        (10, "stability probe", criterion_10),
        (11, "determinism and resume", criterion_11),
    ];
    let only: Option<u32> = std::env::var("LLB_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut failures = 0;
    for (n, name, check) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t0 = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {n:>2} {tag} {name}: {detail} [{:.1}s]", t0.elapsed().as_secs_f64());
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

use llb::littlewood_paley::DyadicPartition;
use llb::solver::{
    split_solution, LlbParams, MonitorToggles, Solver, SolverError, SolverSettings, ACC_BLOWUP, ACC_PSI,
};
use llb::spectral::{heat_propagate, Grid, SpectralField};

fn settings(dt: f64) -> SolverSettings {
    SolverSettings { dt: Some(dt), ..Default::default() }
}

fn ode(c0: f64, kappa: f64, mu: f64, t: f64) -> f64 {
    1.0 / ((1.0 / (c0 * c0) + mu) * (2.0 * kappa * t).exp() - mu).sqrt()
}

#[test]
fn constant_data_follows_scalar_ode() {
    let grid = Grid::periodic(16).unwrap();
    let (c0, kappa, mu) = (0.1, 1.0, 1.0);
    let u0 = SpectralField::constant(grid, [0.0, c0, 0.0]);
    let end = Solver::new(&u0, LlbParams::new(kappa, mu), settings(0.01)).unwrap().run(5.0).unwrap();
    let expect = ode(c0, kappa, mu, 5.0) * grid.volume().sqrt();
    let got = end.u.l2_norm();
    assert!((got - expect).abs() < 1e-8 * expect, "{got} vs {expect}");
    let m = end.u.mean();
    assert!(m[0].abs() + m[2].abs() < 1e-14 * m[1].abs());
}

#[test]
fn zero_data_stays_zero() {
    let grid = Grid::periodic(16).unwrap();
    let u0 = SpectralField::zeros(grid);
    let end = Solver::new(&u0, LlbParams::new(1.0, 1.0), settings(0.1)).unwrap().run(1.0).unwrap();
    assert_eq!(end.u.max_abs_coeff(), 0.0);
    let s = &end.last;
    for v in [s.l2_energy, s.grad_l2, s.l4_fourth_power, s.besov_32, s.besov_72, s.phi_t, s.blowup_integrand, s.hm_norm] {
        assert_eq!(v, 0.0);
    }
    assert_eq!(s.psi_t, 1.0);
    assert_eq!(end.accumulators[ACC_BLOWUP], 0.0);
    assert!((end.accumulators[ACC_PSI] - 1.0).abs() < 1e-12);
}

#[test]
fn tiny_data_is_linear() {
    let grid = Grid::periodic(16).unwrap();
    let u0 = &SpectralField::with_mode(grid, 0, [1, 2, 0], 1e-10, 0.3).unwrap()
        + &SpectralField::with_mode(grid, 2, [0, -1, 3], 1e-10, 1.1).unwrap();
    let kappa = 0.7;
    let end = Solver::new(&u0, LlbParams::new(kappa, 1.0), settings(0.01)).unwrap().run(0.5).unwrap();
    let heat = heat_propagate(&u0, 0.5, kappa);
    let rel = (&end.u - &heat).l2_norm() / heat.l2_norm();
    assert!(rel < 1e-10, "{rel}");
}

#[test]
fn split_at_start_is_all_linear() {
    let grid = Grid::periodic(16).unwrap();
    let u0 = SpectralField::with_mode(grid, 1, [1, 1, 0], 0.2, 0.0).unwrap();
    let params = LlbParams::new(1.0, 1.0);
    let solver = Solver::new(&u0, params.clone(), settings(0.01)).unwrap();
    let start = solver.initial_state().unwrap();
    for damped in [false, true] {
        let (ul, rest) = split_solution(&start, &u0, &params, damped);
        assert_eq!(rest.max_abs_coeff(), 0.0);
        assert_eq!(ul.coeffs(), u0.coeffs());
    }
}

#[test]
fn friedrichs_matches_full_system_for_odd_data() {
    let grid = Grid::periodic(16).unwrap();
    let phase = -std::f64::consts::FRAC_PI_2;
    let u0 = &(&SpectralField::with_mode(grid, 0, [0, 1, 0], 0.02, phase).unwrap()
        + &SpectralField::with_mode(grid, 1, [0, 0, 1], 0.02, phase).unwrap())
        + &SpectralField::with_mode(grid, 2, [1, 0, 0], 0.02, phase).unwrap();
    let full = Solver::new(&u0, LlbParams::new(1.0, 1.0), settings(0.02)).unwrap().run(0.5).unwrap();
    let fried = Solver::new(&u0, LlbParams::new(1.0, 1.0).with_cutoff(7.0), settings(0.02))
        .unwrap()
        .run(0.5)
        .unwrap();
    let rel = (&full.u - &fried.u).l2_norm() / full.u.l2_norm();
    assert!(rel < 1e-12, "{rel}");
}

#[test]
fn friedrichs_run_stays_in_annulus() {
    let grid = Grid::periodic(16).unwrap();
    let u0 = &SpectralField::with_mode(grid, 0, [1, 0, 0], 0.3, 0.0).unwrap()
        + &SpectralField::constant(grid, [0.5, 0.0, 0.0]);
    let n = 3.0;
    let end = Solver::new(&u0, LlbParams::new(1.0, 1.0).with_cutoff(n), settings(0.02)).unwrap().run(0.4).unwrap();
    assert_eq!(llb::spectral::cutoff_leakage(&end.u, n), 0.0);
    assert_eq!(end.u.mean(), [0.0, 0.0, 0.0]);
}

#[test]
fn unstable_steps_report_divergence() {
    let grid = Grid::periodic(16).unwrap();
    let u0 = SpectralField::constant(grid, [100.0, 0.0, 0.0]);
    let s = SolverSettings { dt: Some(0.1), max_halvings: 2, ..Default::default() };
    let err = Solver::new(&u0, LlbParams::new(1.0, 1.0), s).unwrap().run(1.0).unwrap_err();
    match err {
        SolverError::StepDiverged { last, .. } => assert!(last.u.is_finite()),
        e => panic!("unexpected {e}"),
    }
}

#[test]
fn disabled_monitors_report_nan() {
    let grid = Grid::periodic(16).unwrap();
    let u0 = SpectralField::with_mode(grid, 0, [1, 0, 0], 0.1, 0.0).unwrap();
    let s = SolverSettings {
        dt: Some(0.05),
        monitors: MonitorToggles { l4: false, phi_psi: false, blowup: false, sobolev: false },
        ..Default::default()
    };
    let end = Solver::new(&u0, LlbParams::new(1.0, 1.0), s).unwrap().run(0.2).unwrap();
    let m = &end.last;
    for v in [m.l4_fourth_power, m.conservation_residual, m.phi_t, m.psi_t, m.blowup_integrand, m.hm_norm] {
        assert!(v.is_nan());
    }
    assert!(m.besov_32.is_finite() && m.l2_energy.is_finite());
}

#[test]
fn reruns_are_bitwise_identical() {
    let grid = Grid::periodic(16).unwrap();
    let p = DyadicPartition::build(grid).unwrap();
    let u0 = llb::lab::FieldEnsembleSpec::new(1, llb::lab::Spectrum::PowerLaw { alpha: 1.0 }, 0.1, 9)
        .band_limited(4.0)
        .sample_from_seed(&p, 9);
    let run = || Solver::new(&u0, LlbParams::new(1.0, 1.0).with_cutoff(4.0), settings(0.05)).unwrap().run(0.5).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.u.coeffs(), b.u.coeffs());
    assert_eq!(a.last.csv_row(), b.last.csv_row());
}

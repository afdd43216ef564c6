use crate::spectral::products::{full_keep, llb_nonlinearity};
use crate::spectral::{apply_laplacian, cutoff_leakage, in_cutoff, Grid, SpectralField};

use super::{LlbParams, SolverError};

/// Largest relative mass outside the Friedrichs annulus accepted as input.
pub const CUTOFF_TOLERANCE: f64 = 1e-12;

/// Per-axis mode bound covering the ball `|k| <= n`.
pub(crate) fn cutoff_keep(grid: &Grid, n: Option<f64>) -> usize {
    let full = full_keep(grid);
    match n {
        Some(n) => ((n / grid.wavenumber_scale()).floor() as usize).min(full),
        None => full,
    }
}

fn linear_part(u: &SpectralField, kappa: f64) -> SpectralField {
    apply_laplacian(u).axpy(-kappa, u)
}

/// `Δu − κu + γ u×Δu − κμ|u|²u`, nonlinear terms dealiased.
pub fn rhs_full(u: &SpectralField, params: &LlbParams) -> Result<SpectralField, SolverError> {
    let grid = *u.grid();
    let nl = llb_nonlinearity(u, params.cross_coeff, params.kappa * params.mu, full_keep(&grid))?;
    Ok(&linear_part(u, params.kappa) + &nl)
}

/// As [`rhs_full`] with `𝔼ₙ` applied to both nonlinear terms.
pub fn rhs_friedrichs(u: &SpectralField, params: &LlbParams) -> Result<SpectralField, SolverError> {
    let n = params
        .cutoff_n
        .ok_or_else(|| SolverError::InvalidParams("rhs_friedrichs needs cutoff_n".into()))?;
    let leak = cutoff_leakage(u, n);
    if leak > CUTOFF_TOLERANCE {
        return Err(SolverError::CutoffViolation { leakage: leak });
    }
    let grid = *u.grid();
    let nl = llb_nonlinearity(
        u,
        params.cross_coeff,
        params.kappa * params.mu,
        cutoff_keep(&grid, Some(n)),
    )?;
    let nl = nl.map_multiplier(|idx| if in_cutoff(grid.k_squared(idx), n) { 1.0 } else { 0.0 });
    Ok(&linear_part(u, params.kappa) + &nl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{pointwise_cubic, spectral_cutoff};

    fn params() -> LlbParams {
        LlbParams::new(0.7, 1.3)
    }

    #[test]
    fn zero_field() {
        let g = Grid::periodic(8).unwrap();
        let z = SpectralField::zeros(g);
        assert_eq!(rhs_full(&z, &params()).unwrap().l2_norm(), 0.0);
        let p = params().with_cutoff(2.0);
        assert_eq!(rhs_friedrichs(&z, &p).unwrap().l2_norm(), 0.0);
    }

    #[test]
    fn constant_field_reduces_to_ode() {
        let g = Grid::periodic(8).unwrap();
        let c = 0.4;
        let u = SpectralField::constant(g, [c, 0.0, 0.0]);
        let r = rhs_full(&u, &params()).unwrap();
        let (k, m) = (0.7, 1.3);
        let expect = -k * c - k * m * c * c * c;
        assert!((r.mean()[0] - expect).abs() < 1e-15);
        assert!(r.mean()[1].abs() < 1e-15 && r.mean()[2].abs() < 1e-15);
    }

    #[test]
    fn rejects_leaking_input() {
        let g = Grid::periodic(16).unwrap();
        let u = SpectralField::with_mode(g, 0, [4, 0, 0], 1.0, 0.0).unwrap();
        let p = params().with_cutoff(2.0);
        assert!(matches!(rhs_friedrichs(&u, &p), Err(SolverError::CutoffViolation { .. })));
    }

    #[test]
    fn friedrichs_output_in_annulus() {
        let g = Grid::periodic(16).unwrap();
        let u = &SpectralField::with_mode(g, 0, [1, 1, 0], 1.0, 0.3).unwrap()
            + &SpectralField::with_mode(g, 1, [0, 2, 1], 0.5, 1.1).unwrap();
        let p = params().with_cutoff(2.5);
        let r = rhs_friedrichs(&u, &p).unwrap();
        let diff = &r - &spectral_cutoff(&r, 2.5);
        assert!(diff.l2_norm() < 1e-14 * r.l2_norm());
        let cubic = pointwise_cubic(&u).unwrap();
        assert!(cutoff_leakage(&cubic, 2.5) > 0.1);
    }
}

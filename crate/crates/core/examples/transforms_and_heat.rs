//! Forward/inverse transforms, spectral cutoff and the damped heat multiplier
//! on a single Fourier mode.

use llb::spectral::{
    apply_laplacian, cutoff_leakage, forward_transform, heat_propagate, inverse_transform, spectral_cutoff, Grid,
    PhysicalField, SpectralField,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::periodic(16)?;
    let k = [2i64, 1, -1];
    let wave = move |x: [f64; 3]| (k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]).cos();
    let u = forward_transform(&PhysicalField::from_fn(grid, |x| [wave(x), 0.0, 0.0])?);
    println!("coefficient at k = {k:?}: {}", u.coeff(0, k).unwrap());
    println!("L2 norm: {:.12} (expected {:.12})", u.l2_norm(), (grid.volume() / 2.0).sqrt());

    let lap = apply_laplacian(&u);
    println!("Laplacian coefficient: {}", lap.coeff(0, k).unwrap());

    for (t, kappa) in [(0.05, 0.0), (0.05, 2.0), (0.2, 2.0)] {
        let v = heat_propagate(&u, t, kappa);
        let ratio = v.l2_norm() / u.l2_norm();
        println!("t = {t}, kappa = {kappa}: decay {ratio:.12e}, exp(-(|k|^2+kappa)t) = {:.12e}", (-(6.0 + kappa) * t).exp());
    }

    let mixed = &u + &SpectralField::with_mode(grid, 1, [5, 0, 0], 0.3, 0.0)?;
    let cut = spectral_cutoff(&mixed, 3.0);
    println!("leakage outside [1/3, 3]: before {:.3e}, after {:.3e}", cutoff_leakage(&mixed, 3.0), cutoff_leakage(&cut, 3.0));

    let back = inverse_transform(&u)?;
    println!("max |u(x)| = {:.15}", back.max_abs());
    Ok(())
}

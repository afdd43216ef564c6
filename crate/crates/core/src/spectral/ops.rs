use rustfft::num_complex::Complex64;

use super::fft::{box_indices, plan};
use super::field::{PhysicalField, SpectralField};
use super::products::{forward_pairs, PaddedEval};
use super::SpectralError;

/// Tolerance on the imaginary residue of an inverse transform.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// Discrete Fourier transform, normalized so the zero mode is the mean.
pub fn forward_transform(f: &PhysicalField) -> SpectralField {
    let grid = *f.grid();
    let n = grid.n();
    let np = grid.points();
    let bufs = vec![
        f.component(0)
            .iter()
            .zip(f.component(1))
            .map(|(a, b)| Complex64::new(*a, *b))
            .collect::<Vec<_>>(),
        f.component(2).iter().map(|a| Complex64::new(*a, 0.0)).collect(),
    ];
    let comps = forward_pairs(&grid, n, bufs, 3, n / 2);
    let mut coeffs = Vec::with_capacity(3 * np);
    for c in comps {
        coeffs.extend(c);
    }
    SpectralField::from_parts(grid, coeffs, true)
}

/// Inverse discrete Fourier transform.
///
/// Each component is transformed as complex data. The imaginary parts are
/// discarded after checking `max|Im| <= 1e-10 * max(1, max|Re|)`.
pub fn inverse_transform(f: &SpectralField) -> Result<PhysicalField, SpectralError> {
    let grid = *f.grid();
    let n = grid.n();
    let np = grid.points();
    let fft = plan(n);
    let sel = box_indices(n, n / 2);
    let mut values = Vec::with_capacity(3 * np);
    let mut max_im = 0.0f64;
    let mut max_re = 0.0f64;
    for c in 0..3 {
        let mut z = f.component(c).to_vec();
        fft.inverse(&mut z, &sel);
        for v in &z {
            max_im = max_im.max(v.im.abs());
            max_re = max_re.max(v.re.abs());
            values.push(v.re);
        }
    }
    if max_im > IMAG_TOLERANCE * max_re.max(1.0) {
        return Err(SpectralError::NonRealOutput { residue: max_im });
    }
    Ok(PhysicalField::from_parts(grid, values))
}

/// Grid values of a real field on its native grid, using pruned transforms.
pub(crate) fn to_physical_fast(f: &SpectralField) -> PhysicalField {
    let grid = *f.grid();
    let np = grid.points();
    let ev = PaddedEval::new(
        grid,
        &[f.component(0), f.component(1), f.component(2)],
        f.support_radius(),
        grid.n(),
    );
    let mut values = vec![0.0; 3 * np];
    for c in 0..3 {
        for p in 0..np {
            values[c * np + p] = ev.value(c, p);
        }
    }
    PhysicalField::from_parts(grid, values)
}

/// Multiplies each mode by `-|k|²`.
pub fn apply_laplacian(f: &SpectralField) -> SpectralField {
    let g = *f.grid();
    f.map_multiplier(|idx| -g.k_squared(idx))
}

/// Multiplies each mode by `exp(-(|k|² + damping) t)`.
pub fn heat_propagate(f: &SpectralField, t: f64, damping: f64) -> SpectralField {
    assert!(t >= 0.0 && t.is_finite(), "heat_propagate needs t >= 0");
    if t == 0.0 {
        return f.clone();
    }
    let g = *f.grid();
    f.map_multiplier(|idx| (-(g.k_squared(idx) + damping) * t).exp())
}

/// Keeps modes with `1/n <= |k| <= n`.
pub fn spectral_cutoff(f: &SpectralField, n: f64) -> SpectralField {
    assert!(n > 0.0 && !n.is_nan(), "cutoff needs n > 0");
    let g = *f.grid();
    f.map_multiplier(|idx| if in_cutoff(g.k_squared(idx), n) { 1.0 } else { 0.0 })
}

#[inline]
pub(crate) fn in_cutoff(k2: f64, n: f64) -> bool {
    let k = k2.sqrt();
    k >= 1.0 / n && k <= n
}

/// L² mass of `f` outside `[1/n, n]` relative to its total mass.
pub fn cutoff_leakage(f: &SpectralField, n: f64) -> f64 {
    let g = *f.grid();
    let np = g.points();
    let mut outside = 0.0;
    let mut total = 0.0;
    for idx in 0..np {
        let inside = in_cutoff(g.k_squared(idx), n);
        for c in 0..3 {
            let e = f.coeffs()[c * np + idx].norm_sqr();
            total += e;
            if !inside {
                outside += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (outside / total).sqrt()
    }
}

/// Partial derivative along `axis`.
pub fn partial_derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let g = *f.grid();
    let np = g.points();
    let mut out = f.clone();
    let coeffs = out.coeffs_mut();
    for idx in 0..np {
        let k = g.wavevector(idx)[axis];
        let nyq = g.is_nyquist(idx) && g.modes_at(idx)[axis] == -((g.n() / 2) as i64);
        for c in 0..3 {
            let z = &mut coeffs[c * np + idx];
            *z = if nyq { Complex64::new(0.0, 0.0) } else { *z * Complex64::new(0.0, k) };
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn cosine_transform_pair() {
        let g = Grid::periodic(8).unwrap();
        let f = PhysicalField::from_fn(g, |x| [x[0].cos(), 0.0, 0.0]).unwrap();
        let s = forward_transform(&f);
        assert!((s.coeff(0, [1, 0, 0]).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((s.coeff(0, [-1, 0, 0]).unwrap() - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let back = inverse_transform(&s).unwrap();
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn laplacian_symbols() {
        let g = Grid::periodic(8).unwrap();
        let u = SpectralField::with_mode(g, 2, [0, 2, 0], 1.0, 0.0).unwrap();
        let l = apply_laplacian(&u);
        assert!((&l - &u.scale(-4.0)).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn cutoff_removes_mean_and_high_modes() {
        let g = Grid::periodic(8).unwrap();
        let u = &SpectralField::constant(g, [1.0, 2.0, 3.0])
            + &SpectralField::with_mode(g, 0, [2, 0, 0], 1.0, 0.0).unwrap();
        assert_eq!(spectral_cutoff(&u, 1.0).max_abs_coeff(), 0.0);
        let big = spectral_cutoff(&u, 100.0);
        assert_eq!(big.mean(), [0.0, 0.0, 0.0]);
        assert!(cutoff_leakage(&big, 100.0) == 0.0);
    }

    #[test]
    fn fast_physical_matches_inverse() {
        let g = Grid::periodic(8).unwrap();
        let u = &SpectralField::with_mode(g, 0, [1, 2, 3], 1.0, 0.4).unwrap()
            + &SpectralField::with_mode(g, 2, [-1, 0, 1], 0.5, 1.0).unwrap();
        let a = to_physical_fast(&u);
        let b = inverse_transform(&u).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}

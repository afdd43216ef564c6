use rustfft::num_complex::Complex64;

use crate::spectral::products::{dealias_size, ensure_real, forward_pairs, full_keep, PaddedEval};
use crate::spectral::{product, Bilinear, SpectralField};

use super::norms::{dyadic_block, low_freq_cutoff};
use super::partition::DyadicPartition;
use super::LpError;

/// Sum of componentwise products of the given pairs, evaluated on one padded cube.
fn sum_of_products(
    template: &SpectralField,
    pairs: &[(SpectralField, SpectralField)],
) -> SpectralField {
    let grid = *template.grid();
    let k_in = pairs
        .iter()
        .map(|(a, b)| a.support_radius().max(b.support_radius()))
        .max()
        .unwrap_or(0)
        .min(full_keep(&grid));
    let k_keep = full_keep(&grid).min(2 * k_in);
    let m = dealias_size(k_in, k_keep, 2);
    let m3 = m * m * m;
    let mut acc = [vec![0.0; m3], vec![0.0; m3], vec![0.0; m3]];
    for (a, b) in pairs {
        if a.max_abs_coeff() == 0.0 || b.max_abs_coeff() == 0.0 {
            continue;
        }
        let ev = PaddedEval::new(
            grid,
            &[
                a.component(0),
                a.component(1),
                a.component(2),
                b.component(0),
                b.component(1),
                b.component(2),
            ],
            k_in,
            m,
        );
        for (c, slot) in acc.iter_mut().enumerate() {
            for (p, x) in slot.iter_mut().enumerate() {
                *x += ev.value(c, p) * ev.value(c + 3, p);
            }
        }
    }
    let bufs = vec![
        acc[0]
            .iter()
            .zip(&acc[1])
            .map(|(x, y)| Complex64::new(*x, *y))
            .collect(),
        acc[2].iter().map(|x| Complex64::new(*x, 0.0)).collect(),
    ];
    let comps = forward_pairs(&grid, m, bufs, 3, k_keep);
    let mut coeffs = Vec::with_capacity(3 * grid.points());
    for c in comps {
        coeffs.extend(c);
    }
    SpectralField::from_coeffs(grid, coeffs, true).expect("real products stay real")
}

/// `T_u v = sum_j Ṡ_{j-1}u · Δ̇_j v` (componentwise).
pub fn paraproduct(u: &SpectralField, v: &SpectralField, p: &DyadicPartition) -> Result<SpectralField, LpError> {
    p.check_grid(u)?;
    p.check_grid(v)?;
    ensure_real(u)?;
    ensure_real(v)?;
    let mut pairs = Vec::new();
    for j in p.indices() {
        let lo = if j - 1 >= p.j_min() {
            low_freq_cutoff(u, j - 1, p)?
        } else {
            SpectralField::zeros(*u.grid())
        };
        pairs.push((lo, dyadic_block(v, j, p)?));
    }
    Ok(sum_of_products(u, &pairs))
}

/// `R(u, v) = sum_{|j-j'| <= 1} Δ̇_j u · Δ̇_{j'} v` (componentwise).
pub fn remainder(u: &SpectralField, v: &SpectralField, p: &DyadicPartition) -> Result<SpectralField, LpError> {
    p.check_grid(u)?;
    p.check_grid(v)?;
    ensure_real(u)?;
    ensure_real(v)?;
    let mut pairs = Vec::new();
    for j in p.indices() {
        let lo = (j - 1).max(p.j_min());
        let hi = (j + 1).min(p.j_max());
        let g = v.map_multiplier(|idx| (lo..=hi).map(|q| p.weight(q, idx)).sum());
        pairs.push((dyadic_block(u, j, p)?, g));
    }
    Ok(sum_of_products(u, &pairs))
}

/// `[Δ̇_j, a] b = Δ̇_j(ab) - a Δ̇_j b` (componentwise products).
pub fn block_commutator(
    a: &SpectralField,
    b: &SpectralField,
    j: i32,
    p: &DyadicPartition,
) -> Result<SpectralField, LpError> {
    p.check_grid(a)?;
    p.check_grid(b)?;
    p.check_index(j, p.j_max())?;
    let ab = product(a, b, Bilinear::Componentwise)?;
    let first = dyadic_block(&ab, j, p)?;
    let second = product(a, &dyadic_block(b, j, p)?, Bilinear::Componentwise)?;
    Ok(&first - &second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn fields(g: Grid) -> (SpectralField, SpectralField) {
        let u = &SpectralField::with_mode(g, 0, [1, 2, 0], 1.0, 0.3).unwrap()
            + &SpectralField::with_mode(g, 1, [0, 5, -3], 0.5, 1.1).unwrap();
        let v = &SpectralField::with_mode(g, 0, [3, 0, 1], 0.7, 0.2).unwrap()
            + &SpectralField::with_mode(g, 1, [-1, 1, 1], 1.3, 2.0).unwrap();
        (u, v)
    }

    #[test]
    fn bony_reconstruction() {
        let g = Grid::periodic(32).unwrap();
        let p = DyadicPartition::build(g).unwrap();
        let (u, v) = fields(g);
        let total = &(&paraproduct(&u, &v, &p).unwrap() + &paraproduct(&v, &u, &p).unwrap())
            + &remainder(&u, &v, &p).unwrap();
        let direct = product(&u, &v, Bilinear::Componentwise).unwrap();
        assert!((&total - &direct).l2_norm() < 1e-12 * direct.l2_norm());
        let r1 = remainder(&u, &v, &p).unwrap();
        let r2 = remainder(&v, &u, &p).unwrap();
        assert!((&r1 - &r2).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn constant_commutes() {
        let g = Grid::periodic(16).unwrap();
        let p = DyadicPartition::build(g).unwrap();
        let (_, v) = fields(g);
        let a = SpectralField::constant(g, [2.0, -1.0, 0.5]);
        let c = block_commutator(&a, &v, 1, &p).unwrap();
        assert!(c.max_abs_coeff() < 1e-12);
        assert_eq!(paraproduct(&a, &v, &p).unwrap().max_abs_coeff(), 0.0);
    }
}

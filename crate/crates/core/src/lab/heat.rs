use std::collections::BTreeMap;

use crate::littlewood_paley::{block_l2_norms, besov_from_l2_blocks, DyadicPartition};
use crate::spectral::SpectralField;

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Heat-flow block energies grouped by `(|k|², j)`.
struct HeatProfile {
    per_block: Vec<Vec<(f64, f64)>>,
    lambda_max: f64,
    volume: f64,
}

impl HeatProfile {
    fn new(u0: &SpectralField, p: &DyadicPartition) -> Self {
        let g = u0.grid();
        let np = g.points();
        let c = u0.coeffs();
        let jm = p.j_min();
        let mut levels: BTreeMap<(i64, i32), f64> = BTreeMap::new();
        let mut lambda_max = 0.0f64;
        let scale2 = g.wavenumber_scale().powi(2);
        for idx in 1..np {
            let e = c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr();
            if e == 0.0 {
                continue;
            }
            let m = g.modes_at(idx);
            let key = m[0] * m[0] + m[1] * m[1] + m[2] * m[2];
            lambda_max = lambda_max.max(key as f64 * scale2);
            for j in p.indices() {
                let w = p.weight(j, idx);
                if w > 0.0 {
                    *levels.entry((key, j)).or_insert(0.0) += w * w * e;
                }
            }
        }
        let mut per_block = vec![Vec::new(); p.block_count()];
        for ((key, j), c) in levels {
            per_block[(j - jm) as usize].push((key as f64 * scale2, c));
        }
        HeatProfile { per_block, lambda_max, volume: g.volume() }
    }

    /// `‖e^{tΔ} u0‖_{Ḃ^σ_{2,1}}`.
    fn besov_at(&self, t: f64, sigma: f64, p: &DyadicPartition) -> f64 {
        let blocks: Vec<f64> = self
            .per_block
            .iter()
            .map(|lv| {
                let s: f64 = lv.iter().map(|(l, c)| c * (-2.0 * l * t).exp()).sum();
                (s * self.volume).sqrt()
            })
            .collect();
        besov_from_l2_blocks(&blocks, sigma, 1.0, p)
    }
}

/// `(‖e^{tΔ}u0‖_{L^m_T Ḃ^{s+2+2/m}_{2,1}}, ‖u0‖_{Ḃ^{s+2}_{2,1}})`.
///
/// The time integral uses 8-point Gauss–Legendre panels on a dyadic time grid
/// refined towards `t = 0`.
pub fn heat_smoothing_sides(
    u0: &SpectralField,
    m: f64,
    s: f64,
    horizon: f64,
    p: &DyadicPartition,
) -> (f64, f64) {
    let rhs = besov_from_l2_blocks(&block_l2_norms(u0, p), s + 2.0, 1.0, p);
    if m.is_infinite() {
        return (rhs, rhs);
    }
    let prof = HeatProfile::new(u0, p);
    if prof.lambda_max == 0.0 {
        return (0.0, rhs);
    }
    let sigma = s + 2.0 + 2.0 / m;
    let levels = ((8.0 * prof.lambda_max * horizon).log2().ceil().max(0.0)) as i32;
    let mut edges = vec![0.0];
    for q in (0..=levels).rev() {
        edges.push(horizon * 2f64.powi(-q));
    }
    let mut integral = 0.0;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for t in [mid - half * x, mid + half * x] {
                integral += wt * half * prof.besov_at(t, sigma, p).powf(m);
            }
        }
    }
    (integral.powf(1.0 / m), rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::littlewood_paley::besov_norm;
    use crate::littlewood_paley::BesovParams;
    use crate::spectral::Grid;

    #[test]
    fn single_mode_closed_form() {
        let g = Grid::periodic(16).unwrap();
        let p = DyadicPartition::build(g).unwrap();
        let u = SpectralField::with_mode(g, 0, [2, 1, 0], 1.0, 0.0).unwrap();
        let k2 = 5.0;
        for (m, s) in [(1.0, -0.5), (2.0, 0.0), (1.5, 0.3)] {
            let (lhs, rhs) = heat_smoothing_sides(&u, m, s, 1.0, &p);
            let b = besov_norm(&u, BesovParams::homogeneous(s + 2.0 + 2.0 / m, 2.0, 1.0), &p)
                .unwrap()
                .value;
            let expect = b * ((1.0 - (-m * k2 * 1.0f64).exp()) / (m * k2)).powf(1.0 / m);
            assert!((lhs - expect).abs() < 1e-12 * expect, "m={m}: {lhs} vs {expect}");
            assert!(rhs > 0.0);
        }
    }

    #[test]
    fn zero_data() {
        let g = Grid::periodic(16).unwrap();
        let p = DyadicPartition::build(g).unwrap();
        let (l, r) = heat_smoothing_sides(&SpectralField::zeros(g), 1.0, 0.0, 1.0, &p);
        assert_eq!((l, r), (0.0, 0.0));
    }
}

use crate::spectral::{Grid, SpectralField};

use super::LpError;

const CHI_FLAT: f64 = 0.75;
const CHI_EDGE: f64 = 4.0 / 3.0;
/// Outer edge of the annulus carrying `phi`.
pub const PHI_OUTER: f64 = 8.0 / 3.0;
/// Inner edge of the annulus carrying `phi`.
pub const PHI_INNER: f64 = 0.75;

#[inline]
fn bump(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth radial cutoff: 1 on `[0, 3/4]`, 0 from `4/3` on, monotone between.
pub fn chi(r: f64) -> f64 {
    if r <= CHI_FLAT {
        return 1.0;
    }
    if r >= CHI_EDGE {
        return 0.0;
    }
    let a = bump(CHI_EDGE - r);
    let b = bump(r - CHI_FLAT);
    a / (a + b)
}

/// Annulus profile `chi(r/2) - chi(r)`, supported in `[3/4, 8/3]`.
pub fn phi(r: f64) -> f64 {
    chi(0.5 * r) - chi(r)
}

/// Per-mode dyadic weights: the first block touching `|k|` and the two
/// consecutive block weights starting there.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ModeWeights {
    pub j0: i32,
    pub w: [f64; 2],
    pub chi: f64,
}

/// Sampled partition of unity on a grid with its resolvable index range.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    j_min: i32,
    j_max: i32,
    table: Vec<ModeWeights>,
}

/// Minimum number of annuli that must fit inside the axis Nyquist sphere.
pub const MIN_SHELLS: usize = 3;

impl DyadicPartition {
    pub fn build(grid: Grid) -> Result<Self, LpError> {
        let np = grid.points();
        let scale = grid.wavenumber_scale();
        let mut table = Vec::with_capacity(np);
        let mut j_min = i32::MAX;
        let mut j_max = i32::MIN;
        for idx in 0..np {
            let r = grid.k_squared(idx).sqrt();
            if r == 0.0 {
                table.push(ModeWeights { j0: 0, w: [0.0, 0.0], chi: 1.0 });
                continue;
            }
            let mut j0 = (r * 3.0 / 8.0).log2().floor() as i32 + 1;
            while phi(r * 2f64.powi(-(j0 - 1))) > 0.0 {
                j0 -= 1;
            }
            while phi(r * 2f64.powi(-j0)) == 0.0 {
                j0 += 1;
            }
            let w0 = phi(r * 2f64.powi(-j0));
            let w1 = phi(r * 2f64.powi(-(j0 + 1)));
            debug_assert_eq!(phi(r * 2f64.powi(-(j0 + 2))), 0.0);
            j_min = j_min.min(j0);
            j_max = j_max.max(if w1 > 0.0 { j0 + 1 } else { j0 });
            table.push(ModeWeights { j0, w: [w0, w1], chi: chi(r) });
        }
        let nyq = (grid.n() / 2) as f64 * scale;
        let shells = (j_min..=j_max)
            .filter(|&j| 2f64.powi(j) * PHI_OUTER <= nyq)
            .count();
        if shells < MIN_SHELLS {
            return Err(LpError::GridTooSmall { shells, required: MIN_SHELLS });
        }
        Ok(DyadicPartition { grid, j_min, j_max, table })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn block_count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub(crate) fn mode(&self, idx: usize) -> &ModeWeights {
        &self.table[idx]
    }

    /// `phi(2^{-j}|k|)` at flat mode index `idx`.
    #[inline]
    pub fn weight(&self, j: i32, idx: usize) -> f64 {
        let m = &self.table[idx];
        if m.w[0] == 0.0 && m.w[1] == 0.0 {
            return 0.0;
        }
        if j == m.j0 {
            m.w[0]
        } else if j == m.j0 + 1 {
            m.w[1]
        } else {
            0.0
        }
    }

    /// Inhomogeneous weight: block `-1` is `chi(|k|)`, blocks `q >= 0` are `phi(2^{-q}|k|)`.
    #[inline]
    pub fn inhomogeneous_weight(&self, q: i32, idx: usize) -> f64 {
        if q == -1 {
            self.table[idx].chi
        } else if q >= 0 {
            self.weight(q, idx)
        } else {
            0.0
        }
    }

    /// Largest `|1 - sum_j phi(2^{-j}|k|)|` over nonzero modes, summed over `[j_min, j_max]`.
    pub fn homogeneous_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 1..self.table.len() {
            let s: f64 = self.indices().map(|j| self.weight(j, idx)).sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    /// Largest `|1 - chi(|k|) - sum_{q>=0} phi(2^{-q}|k|)|` over all modes.
    pub fn inhomogeneous_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for idx in 0..self.table.len() {
            let s: f64 = (-1..=self.j_max.max(0))
                .map(|q| self.inhomogeneous_weight(q, idx))
                .sum();
            worst = worst.max((s - 1.0).abs());
        }
        worst
    }

    pub(crate) fn check_index(&self, j: i32, hi: i32) -> Result<(), LpError> {
        if j < self.j_min || j > hi {
            return Err(LpError::IndexOutOfRange { j, lo: self.j_min, hi });
        }
        Ok(())
    }

    pub(crate) fn check_grid(&self, f: &SpectralField) -> Result<(), LpError> {
        if f.grid() != &self.grid {
            return Err(LpError::GridMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_supports() {
        assert_eq!(phi(0.75 - 1e-9), 0.0);
        assert_eq!(phi(8.0 / 3.0 + 1e-9), 0.0);
        assert_eq!(phi(0.75), 0.0);
        assert!(phi(1.0) > 0.0 && phi(2.0) > 0.0);
        assert_eq!(phi(1.4), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(1.34), 0.0);
        for i in 0..400 {
            let r = i as f64 * 0.01;
            assert!((0.0..=1.0).contains(&phi(r)));
            assert!((0.0..=1.0).contains(&chi(r)));
            assert!(chi(r) >= chi(r + 0.01));
        }
    }

    #[test]
    fn range_for_64() {
        let p = DyadicPartition::build(Grid::periodic(64).unwrap()).unwrap();
        assert_eq!((p.j_min(), p.j_max()), (-1, 6));
        assert!(p.homogeneous_residual() < 1e-12);
        assert!(p.inhomogeneous_residual() < 1e-12);
    }

    #[test]
    fn too_small() {
        assert!(matches!(
            DyadicPartition::build(Grid::periodic(8).unwrap()),
            Err(LpError::GridTooSmall { .. })
        ));
        assert!(DyadicPartition::build(Grid::periodic(16).unwrap()).is_ok());
    }
}

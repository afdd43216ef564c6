use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Uniform periodic grid on the cube `[0, L)^3` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    box_length: f64,
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self, SpectralError> {
        if n < 8 || n % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "n_per_axis must be even and >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "box_length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Grid { n, box_length })
    }

    /// Grid on the standard torus of period 2π (integer wavenumbers).
    pub fn periodic(n: usize) -> Result<Self, SpectralError> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    /// Number of grid points (and of Fourier modes) per component.
    pub fn points(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Factor turning integer mode numbers into angular wavenumbers.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    /// Integer mode number stored at FFT index `i` (`0..n/2` then `-n/2..0`).
    #[inline]
    pub fn mode_number(&self, i: usize) -> i64 {
        signed_mode(i, self.n)
    }

    /// FFT index of the integer mode number `k`, if it is representable.
    pub fn index_of_mode(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            return None;
        }
        Some(if k >= 0 { k as usize } else { (k + self.n as i64) as usize })
    }

    #[inline]
    pub fn flat(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n + i2) * self.n + i3
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Integer mode triple at flat index `idx`.
    #[inline]
    pub fn modes_at(&self, idx: usize) -> [i64; 3] {
        let (i1, i2, i3) = self.unflat(idx);
        [
            self.mode_number(i1),
            self.mode_number(i2),
            self.mode_number(i3),
        ]
    }

    /// Squared angular wavenumber |k|^2 at flat index `idx`.
    #[inline]
    pub fn k_squared(&self, idx: usize) -> f64 {
        let m = self.modes_at(idx);
        let s = self.wavenumber_scale();
        let sq = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64;
        sq * s * s
    }

    /// Angular wavenumber vector at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.modes_at(idx);
        let s = self.wavenumber_scale();
        [m[0] as f64 * s, m[1] as f64 * s, m[2] as f64 * s]
    }

    /// Flat index of the mode `-k` (with the Nyquist index mapping to itself).
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i1, i2, i3) = self.unflat(idx);
        self.flat((n - i1) % n, (n - i2) % n, (n - i3) % n)
    }

    /// True when any axis sits on the Nyquist index `n/2`.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let (i1, i2, i3) = self.unflat(idx);
        let h = self.n / 2;
        i1 == h || i2 == h || i3 == h
    }

    /// Largest |k| over all grid modes (the corner of the mode cube).
    pub fn max_wavenumber(&self) -> f64 {
        let h = (self.n / 2) as f64;
        (3.0f64).sqrt() * h * self.wavenumber_scale()
    }

    /// Coordinates of grid point index `i` along one axis.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }
}

#[inline]
pub(crate) fn signed_mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// |k| of FFT index `i` on an `n`-point axis, as an unsigned mode number.
#[inline]
pub(crate) fn abs_mode(i: usize, n: usize) -> usize {
    if i <= n / 2 {
        i
    } else {
        n - i
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd() {
        assert!(Grid::periodic(6).is_err());
        assert!(Grid::periodic(9).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
        assert!(Grid::periodic(8).is_ok());
    }

    #[test]
    fn integer_wavenumbers_on_2pi_box() {
        let g = Grid::periodic(8).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.mode_number(i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.wavenumber_scale(), 1.0);
        assert_eq!(g.index_of_mode(-1), Some(7));
        assert_eq!(g.index_of_mode(4), None);
        let idx = g.flat(1, 7, 2);
        assert_eq!(g.modes_at(idx), [1, -1, 2]);
        assert_eq!(g.k_squared(idx), 6.0);
        assert_eq!(g.modes_at(g.conjugate_index(idx)), [-1, 1, -2]);
    }

    #[test]
    fn scaled_wavenumbers() {
        let g = Grid::new(8, PI).unwrap();
        let idx = g.flat(1, 0, 0);
        assert!((g.k_squared(idx) - 4.0).abs() < 1e-15);
    }
}

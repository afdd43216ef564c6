use std::ops::{Add, Mul, Sub};

use rustfft::num_complex::Complex64;

use super::grid::{abs_mode, Grid};
use super::SpectralError;

/// Relative tolerance on the Hermitian defect for a field to count as real.
pub const REAL_TOLERANCE: f64 = 1e-10;

/// Fourier coefficients of a three-component vector field.
///
/// Storage is component-major, then `k1`, `k2`, `k3` in FFT index order.
/// The coefficient at `k` is the discrete mean of `f(x) e^{-i k.x}`, so the
/// zero mode equals the spatial average.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    real: bool,
}

/// Grid samples of a three-component real vector field, component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); 3 * grid.points()],
            real: true,
        }
    }

    /// Wraps raw coefficients. When `real` is requested the Hermitian defect
    /// is checked against [`REAL_TOLERANCE`].
    pub fn from_coeffs(
        grid: Grid,
        coeffs: Vec<Complex64>,
        real: bool,
    ) -> Result<Self, SpectralError> {
        if coeffs.len() != 3 * grid.points() {
            return Err(SpectralError::ShapeMismatch {
                expected: 3 * grid.points(),
                got: coeffs.len(),
            });
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SpectralError::NonFinite);
        }
        let f = SpectralField { grid, coeffs, real: false };
        if real {
            let defect = f.hermitian_defect();
            if defect > REAL_TOLERANCE * f.l1_coeffs().max(1.0) {
                return Err(SpectralError::NonRealOutput { residue: defect });
            }
            return Ok(SpectralField { real: true, ..f });
        }
        Ok(f)
    }

    /// Wraps coefficients and sets the real flag iff they pass the Hermitian check.
    pub fn from_coeffs_detect(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        let mut f = Self::from_coeffs(grid, coeffs, false)?;
        f.real = f.hermitian_defect() <= REAL_TOLERANCE * f.l1_coeffs().max(1.0);
        Ok(f)
    }

    /// Internal constructor for results of real-preserving operations.
    pub(crate) fn from_parts(grid: Grid, coeffs: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), 3 * grid.points());
        SpectralField { grid, coeffs, real }
    }

    /// Real field `amplitude * cos(k.x + phase) e_c` for integer mode `k`.
    ///
    /// Puts `amplitude/2 e^{i phase}` at `k` and its conjugate at `-k`.
    pub fn with_mode(
        grid: Grid,
        component: usize,
        k: [i64; 3],
        amplitude: f64,
        phase: f64,
    ) -> Result<Self, SpectralError> {
        if component >= 3 {
            return Err(SpectralError::InvalidArgument(format!(
                "component must be 0, 1 or 2, got {component}"
            )));
        }
        let mut idx = [0usize; 3];
        let mut neg = [0usize; 3];
        for a in 0..3 {
            let half = (grid.n() / 2) as i64;
            if k[a].abs() >= half {
                return Err(SpectralError::InvalidArgument(format!(
                    "mode {:?} is not below the Nyquist index {half}",
                    k
                )));
            }
            idx[a] = grid.index_of_mode(k[a]).expect("checked range");
            neg[a] = grid.index_of_mode(-k[a]).expect("checked range");
        }
        let mut f = Self::zeros(grid);
        let off = component * grid.points();
        let c = Complex64::from_polar(amplitude / 2.0, phase);
        f.coeffs[off + grid.flat(idx[0], idx[1], idx[2])] += c;
        f.coeffs[off + grid.flat(neg[0], neg[1], neg[2])] += c.conj();
        Ok(f)
    }

    /// Spatially constant field with value `value`.
    pub fn constant(grid: Grid, value: [f64; 3]) -> Self {
        let mut f = Self::zeros(grid);
        for (c, v) in value.iter().enumerate() {
            f.coeffs[c * grid.points()] = Complex64::new(*v, 0.0);
        }
        f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let np = self.grid.points();
        &self.coeffs[c * np..(c + 1) * np]
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// Coefficient of component `c` at integer mode `k`.
    pub fn coeff(&self, c: usize, k: [i64; 3]) -> Option<Complex64> {
        let g = &self.grid;
        let i1 = g.index_of_mode(k[0])?;
        let i2 = g.index_of_mode(k[1])?;
        let i3 = g.index_of_mode(k[2])?;
        Some(self.coeffs[c * g.points() + g.flat(i1, i2, i3)])
    }

    /// Sum of `|f(k) - conj f(-k)| / 2` over all modes and components.
    pub fn hermitian_defect(&self) -> f64 {
        let np = self.grid.points();
        let mut d = 0.0;
        for c in 0..3 {
            let comp = &self.coeffs[c * np..(c + 1) * np];
            for (idx, z) in comp.iter().enumerate() {
                let j = self.grid.conjugate_index(idx);
                d += (*z - comp[j].conj()).norm();
            }
        }
        0.5 * d
    }

    fn l1_coeffs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).sum()
    }

    /// Mean value of each component (the zero mode).
    pub fn mean(&self) -> [f64; 3] {
        let np = self.grid.points();
        [
            self.coeffs[0].re,
            self.coeffs[np].re,
            self.coeffs[2 * np].re,
        ]
    }

    /// Copy with the zero mode removed.
    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        let np = self.grid.points();
        for c in 0..3 {
            out.coeffs[c * np] = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Real part of the L² inner product `∫ f·g dx`.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum();
        s * self.grid.volume()
    }

    /// `∫ |f|² dx` computed by Parseval.
    pub fn l2_norm_squared(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|z| z.norm_sqr()).sum();
        s * self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_squared().sqrt()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest per-axis integer mode magnitude carrying a nonzero coefficient.
    ///
    /// Nyquist entries count as `n/2`.
    pub fn support_radius(&self) -> usize {
        support_radius(&self.grid, &self.coeffs)
    }

    /// Multiplies every coefficient by `m(idx)` where `idx` is the per-component flat index.
    pub fn map_multiplier(&self, m: impl Fn(usize) -> f64) -> Self {
        let np = self.grid.points();
        let w: Vec<f64> = (0..np).map(m).collect();
        let mut out = self.clone();
        for comp in out.coeffs.chunks_mut(np) {
            for (z, w) in comp.iter_mut().zip(&w) {
                *z *= *w;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        for z in out.coeffs.iter_mut() {
            *z *= s;
        }
        out
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b * s)
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
            real: self.real && other.real,
        }
    }
}

pub(crate) fn support_radius(grid: &Grid, coeffs: &[Complex64]) -> usize {
    let n = grid.n();
    let np = grid.points();
    let zero = Complex64::new(0.0, 0.0);
    let mut r = 0usize;
    for comp in coeffs.chunks(np) {
        for (idx, z) in comp.iter().enumerate() {
            if *z != zero {
                let (i1, i2, i3) = grid.unflat(idx);
                let m = abs_mode(i1, n).max(abs_mode(i2, n)).max(abs_mode(i3, n));
                r = r.max(m);
            }
        }
    }
    r
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

impl PhysicalField {
    pub fn zeros(grid: Grid) -> Self {
        PhysicalField { grid, values: vec![0.0; 3 * grid.points()] }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != 3 * grid.points() {
            return Err(SpectralError::ShapeMismatch {
                expected: 3 * grid.points(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        Ok(PhysicalField { grid, values })
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<Self, SpectralError> {
        let n = grid.n();
        let np = grid.points();
        let mut values = vec![0.0; 3 * np];
        for i1 in 0..n {
            for i2 in 0..n {
                for i3 in 0..n {
                    let x = [grid.coordinate(i1), grid.coordinate(i2), grid.coordinate(i3)];
                    let v = f(x);
                    let idx = grid.flat(i1, i2, i3);
                    for c in 0..3 {
                        values[c * np + idx] = v[c];
                    }
                }
            }
        }
        Self::from_values(grid, values)
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let np = self.grid.points();
        &self.values[c * np..(c + 1) * np]
    }

    /// Vector value at flat point index `idx`.
    pub fn at(&self, idx: usize) -> [f64; 3] {
        let np = self.grid.points();
        [self.values[idx], self.values[np + idx], self.values[2 * np + idx]]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

//! Pseudo-spectral evaluation of pointwise nonlinearities.
//!
//! Real scalar fields are packed two per complex transform and evaluated on a
//! zero-padded cube large enough that the product of the given degree does
//! not alias onto the retained modes.

use rustfft::num_complex::Complex64;

use super::fft::{box_indices, plan, smooth_size};
use super::field::{SpectralField, REAL_TOLERANCE};
use super::grid::{signed_mode, Grid};
use super::ops::apply_laplacian;
use super::SpectralError;

/// Which pairing of components a bilinear product uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bilinear {
    /// `(u1 v1, u2 v2, u3 v3)`.
    Componentwise,
    /// `u × v`.
    Cross,
}

/// Padded cube size for a degree-`deg` product of fields supported in
/// `|k_i| <= k_in`, keeping output modes `|k_i| <= k_keep`.
pub(crate) fn dealias_size(k_in: usize, k_keep: usize, deg: usize) -> usize {
    let k_prod = deg * k_in;
    smooth_size(
        (k_prod + k_keep + 1)
            .max(2 * k_in + 2)
            .max(2 * k_keep + 2),
    )
}

/// Cube size on which the mean of a degree-`deg` product is exact.
pub(crate) fn quadrature_size(k_in: usize, deg: usize) -> usize {
    smooth_size((deg * k_in + 1).max(2 * k_in + 2))
}

/// Largest retainable per-axis mode on `grid` (below Nyquist).
pub(crate) fn full_keep(grid: &Grid) -> usize {
    grid.n() / 2 - 1
}

/// Physical values of a set of real scalar fields on an `m^3` cube.
pub(crate) struct PaddedEval {
    grid: Grid,
    m: usize,
    n_fields: usize,
    pairs: Vec<Vec<Complex64>>,
}

impl PaddedEval {
    /// Evaluates scalar spectral arrays (each of length `grid.points()`)
    /// supported in `|k_i| <= k_in` on a cube of size `m`.
    ///
    /// When `m > n` the Nyquist entries are dropped; when `m == n` the arrays
    /// are copied verbatim.
    pub(crate) fn new(grid: Grid, fields: &[&[Complex64]], k_in: usize, m: usize) -> Self {
        let n = grid.n();
        let np = grid.points();
        let m3 = m * m * m;
        let native = m == n;
        let k_in = if native { k_in.min(n / 2) } else { k_in.min(n / 2 - 1) };
        assert!(native || m >= 2 * k_in + 1, "padded cube too small");
        let src = box_indices(n, k_in);
        let dst: Vec<usize> = src
            .iter()
            .map(|&i| {
                if native {
                    i
                } else {
                    (signed_mode(i, n) + m as i64) as usize % m
                }
            })
            .collect();
        let sel_m = box_indices(m, k_in);
        let fft = plan(m);
        let mut pairs = Vec::with_capacity(fields.len().div_ceil(2));
        for chunk in fields.chunks(2) {
            let mut z = vec![Complex64::new(0.0, 0.0); m3];
            for (a, &s1) in src.iter().enumerate() {
                for (b, &s2) in src.iter().enumerate() {
                    let srow = (s1 * n + s2) * n;
                    let drow = (dst[a] * m + dst[b]) * m;
                    for (c, &s3) in src.iter().enumerate() {
                        let re = chunk[0][srow + s3];
                        let v = if chunk.len() == 2 {
                            let im = chunk[1][srow + s3];
                            re + Complex64::new(-im.im, im.re)
                        } else {
                            re
                        };
                        z[drow + dst[c]] = v;
                    }
                }
            }
            debug_assert!(chunk.iter().all(|f| f.len() == np));
            fft.inverse(&mut z, &sel_m);
            pairs.push(z);
        }
        PaddedEval { grid, m, n_fields: fields.len(), pairs }
    }

    pub(crate) fn points(&self) -> usize {
        self.m * self.m * self.m
    }

    #[inline]
    pub(crate) fn value(&self, field: usize, p: usize) -> f64 {
        let z = self.pairs[field / 2][p];
        if field % 2 == 0 {
            z.re
        } else {
            z.im
        }
    }

    /// Calls `f` with the values of all fields at every point.
    pub(crate) fn for_each_point(&self, mut f: impl FnMut(&[f64])) {
        let mut vals = vec![0.0; self.n_fields];
        for p in 0..self.points() {
            for (i, v) in vals.iter_mut().enumerate() {
                *v = self.value(i, p);
            }
            f(&vals);
        }
    }

    /// Applies a pointwise kernel and returns the spectral coefficients of its
    /// `n_out` outputs on the native grid, restricted to `|k_i| <= k_keep`.
    pub(crate) fn map_to_spectral(
        &self,
        n_out: usize,
        k_keep: usize,
        mut kernel: impl FnMut(&[f64], &mut [f64]),
    ) -> Vec<Vec<Complex64>> {
        let m3 = self.points();
        let mut vals = vec![0.0; self.n_fields];
        let mut outv = vec![0.0; n_out];
        let mut bufs: Vec<Vec<Complex64>> = (0..n_out.div_ceil(2))
            .map(|_| vec![Complex64::new(0.0, 0.0); m3])
            .collect();
        for p in 0..m3 {
            for (i, v) in vals.iter_mut().enumerate() {
                *v = self.value(i, p);
            }
            kernel(&vals, &mut outv);
            for (q, b) in bufs.iter_mut().enumerate() {
                let re = outv[2 * q];
                let im = if 2 * q + 1 < n_out { outv[2 * q + 1] } else { 0.0 };
                b[p] = Complex64::new(re, im);
            }
        }
        forward_pairs(&self.grid, self.m, bufs, n_out, k_keep)
    }
}

/// Forward-transforms packed real pairs on an `m^3` cube and unpacks the
/// coefficients `|k_i| <= k_keep` onto the native grid (divided by `m^3`).
pub(crate) fn forward_pairs(
    grid: &Grid,
    m: usize,
    mut bufs: Vec<Vec<Complex64>>,
    n_out: usize,
    k_keep: usize,
) -> Vec<Vec<Complex64>> {
    let n = grid.n();
    let np = grid.points();
    let native = m == n;
    let k_keep = if native { k_keep.min(n / 2) } else { k_keep.min(n / 2 - 1) };
    let sel_m = box_indices(m, k_keep);
    let fft = plan(m);
    let src = box_indices(n, k_keep);
    let to_m = |i: usize| -> usize {
        if native {
            i
        } else {
            (signed_mode(i, n) + m as i64) as usize % m
        }
    };
    let dst: Vec<usize> = src.iter().map(|&i| to_m(i)).collect();
    let neg: Vec<usize> = dst.iter().map(|&i| (m - i) % m).collect();
    let norm = 1.0 / (m * m * m) as f64;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); np]; n_out];
    for (q, z) in bufs.iter_mut().enumerate() {
        fft.forward(z, &sel_m);
        let two = 2 * q + 1 < n_out;
        for (a, &s1) in src.iter().enumerate() {
            for (b, &s2) in src.iter().enumerate() {
                let row = (dst[a] * m + dst[b]) * m;
                let nrow = (neg[a] * m + neg[b]) * m;
                let srow = (s1 * n + s2) * n;
                for (c, &s3) in src.iter().enumerate() {
                    let zk = z[row + dst[c]];
                    let zm = z[nrow + neg[c]].conj();
                    let av = (zk + zm) * (0.5 * norm);
                    out[2 * q][srow + s3] = av;
                    if two {
                        let d = (zk - zm) * (0.5 * norm);
                        out[2 * q + 1][srow + s3] = Complex64::new(d.im, -d.re);
                    }
                }
            }
        }
    }
    out
}

/// Vector fields stored compactly on the box `|k_i| <= kb`, evaluated on an
/// `m^3` cube.
pub(crate) struct BoxEval {
    m: usize,
    full: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
    sel: Vec<usize>,
}

impl BoxEval {
    pub(crate) fn new(grid: &Grid, kb: usize, m: usize) -> Self {
        let n = grid.n();
        assert!(kb < n / 2 && m > 2 * kb, "box does not fit");
        let src = box_indices(n, kb);
        let to_m: Vec<usize> = src
            .iter()
            .map(|&i| (signed_mode(i, n) + m as i64) as usize % m)
            .collect();
        let mut full = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (a, &s1) in src.iter().enumerate() {
            for (b, &s2) in src.iter().enumerate() {
                for (c, &s3) in src.iter().enumerate() {
                    full.push((s1 * n + s2) * n + s3);
                    let (x, y, z) = (to_m[a], to_m[b], to_m[c]);
                    pos.push((x * m + y) * m + z);
                    neg.push((((m - x) % m) * m + (m - y) % m) * m + (m - z) % m);
                }
            }
        }
        BoxEval { m, full, pos, neg, sel: box_indices(m, kb) }
    }

    /// Entries per component.
    pub(crate) fn len(&self) -> usize {
        self.full.len()
    }

    /// Native-grid flat index of every box entry.
    pub(crate) fn full_indices(&self) -> &[usize] {
        &self.full
    }

    pub(crate) fn gather(&self, coeffs: &[Complex64], np: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(3 * self.len());
        for c in 0..3 {
            out.extend(self.full.iter().map(|&i| coeffs[c * np + i]));
        }
        out
    }

    pub(crate) fn scatter(&self, compact: &[Complex64], np: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); 3 * np];
        let b = self.len();
        for c in 0..3 {
            for (e, &i) in self.full.iter().enumerate() {
                out[c * np + i] = compact[c * b + e];
            }
        }
        out
    }

    fn physical(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut z = vec![Complex64::new(0.0, 0.0); self.m * self.m * self.m];
        for (e, &p) in self.pos.iter().enumerate() {
            z[p] = a[e] + Complex64::new(-b[e].im, b[e].re);
        }
        plan(self.m).inverse(&mut z, &self.sel);
        z
    }

    fn spectral(&self, mut z: Vec<Complex64>, a: &mut [Complex64], b: &mut [Complex64]) {
        plan(self.m).forward(&mut z, &self.sel);
        let norm = 0.5 / (self.m * self.m * self.m) as f64;
        for e in 0..self.len() {
            let zk = z[self.pos[e]];
            let zm = z[self.neg[e]].conj();
            a[e] = (zk + zm) * norm;
            let d = (zk - zm) * norm;
            b[e] = Complex64::new(d.im, -d.re);
        }
    }

    /// `cross * (u × Δu) - cubic * |u|² u` on the box; needs `m >= 4 kb + 1`.
    pub(crate) fn llb(&self, u: &[Complex64], lap: &[Complex64], cross: f64, cubic: f64) -> Vec<Complex64> {
        let b = self.len();
        let comp = |v: &[Complex64], c: usize| v[c * b..(c + 1) * b].to_vec();
        let z0 = self.physical(&comp(u, 0), &comp(u, 1));
        let z1 = self.physical(&comp(u, 2), &comp(lap, 0));
        let z2 = self.physical(&comp(lap, 1), &comp(lap, 2));
        let m3 = z0.len();
        let mut o0 = vec![Complex64::new(0.0, 0.0); m3];
        let mut o1 = vec![Complex64::new(0.0, 0.0); m3];
        for p in 0..m3 {
            let v = [z0[p].re, z0[p].im, z1[p].re, z1[p].im, z2[p].re, z2[p].im];
            let s = cubic * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            let x = cross * (v[1] * v[5] - v[2] * v[4]) - s * v[0];
            let y = cross * (v[2] * v[3] - v[0] * v[5]) - s * v[1];
            let w = cross * (v[0] * v[4] - v[1] * v[3]) - s * v[2];
            o0[p] = Complex64::new(x, y);
            o1[p] = Complex64::new(w, 0.0);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 3 * b];
        let (first, rest) = out.split_at_mut(b);
        let (second, third) = rest.split_at_mut(b);
        self.spectral(o0, first, second);
        let mut scratch = vec![Complex64::new(0.0, 0.0); b];
        self.spectral(o1, third, &mut scratch);
        out
    }

    /// `∫ |u|^4 dx` over a box of volume `volume`; needs `m >= 4 kb + 1`.
    pub(crate) fn fourth_power_integral(&self, u: &[Complex64], volume: f64) -> f64 {
        let b = self.len();
        let z0 = self.physical(&u[..b], &u[b..2 * b]);
        let zero = vec![Complex64::new(0.0, 0.0); b];
        let z1 = self.physical(&u[2 * b..], &zero);
        let mut s = 0.0;
        for (a, c) in z0.iter().zip(&z1) {
            let q = a.re * a.re + a.im * a.im + c.re * c.re;
            s += q * q;
        }
        s * volume / z0.len() as f64
    }
}

/// Fails unless `u` is flagged real or passes the Hermitian check.
pub(crate) fn ensure_real(u: &SpectralField) -> Result<(), SpectralError> {
    if u.is_real() {
        return Ok(());
    }
    let defect = u.hermitian_defect();
    let scale: f64 = u.coeffs().iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    if defect > REAL_TOLERANCE * scale {
        return Err(SpectralError::NonRealOutput { residue: defect });
    }
    Ok(())
}

fn assemble(grid: Grid, comps: Vec<Vec<Complex64>>) -> SpectralField {
    let mut coeffs = Vec::with_capacity(3 * grid.points());
    for c in comps {
        coeffs.extend(c);
    }
    SpectralField::from_parts(grid, coeffs, true)
}

/// Dealiased `u × Δu`.
pub fn pointwise_cross_with_laplacian(u: &SpectralField) -> Result<SpectralField, SpectralError> {
    ensure_real(u)?;
    let lap = apply_laplacian(u);
    let grid = *u.grid();
    let k_in = u.support_radius().min(full_keep(&grid));
    let k_keep = full_keep(&grid).min(2 * k_in);
    let m = dealias_size(k_in, k_keep, 2);
    let ev = PaddedEval::new(
        grid,
        &[
            u.component(0),
            u.component(1),
            u.component(2),
            lap.component(0),
            lap.component(1),
            lap.component(2),
        ],
        k_in,
        m,
    );
    let out = ev.map_to_spectral(3, k_keep, |v, o| {
        o[0] = v[1] * v[5] - v[2] * v[4];
        o[1] = v[2] * v[3] - v[0] * v[5];
        o[2] = v[0] * v[4] - v[1] * v[3];
    });
    Ok(assemble(grid, out))
}

/// Dealiased `|u|² u`.
pub fn pointwise_cubic(u: &SpectralField) -> Result<SpectralField, SpectralError> {
    ensure_real(u)?;
    let grid = *u.grid();
    let k_in = u.support_radius().min(full_keep(&grid));
    let k_keep = full_keep(&grid).min(3 * k_in);
    let m = dealias_size(k_in, k_keep, 3);
    let ev = PaddedEval::new(grid, &[u.component(0), u.component(1), u.component(2)], k_in, m);
    let out = ev.map_to_spectral(3, k_keep, |v, o| {
        let s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        o[0] = s * v[0];
        o[1] = s * v[1];
        o[2] = s * v[2];
    });
    Ok(assemble(grid, out))
}

/// Dealiased bilinear product of two real fields.
pub fn product(
    u: &SpectralField,
    v: &SpectralField,
    kind: Bilinear,
) -> Result<SpectralField, SpectralError> {
    ensure_real(u)?;
    ensure_real(v)?;
    assert_eq!(u.grid(), v.grid(), "grid mismatch");
    let grid = *u.grid();
    let k_in = u
        .support_radius()
        .max(v.support_radius())
        .min(full_keep(&grid));
    let k_keep = full_keep(&grid).min(2 * k_in);
    let m = dealias_size(k_in, k_keep, 2);
    let ev = PaddedEval::new(
        grid,
        &[
            u.component(0),
            u.component(1),
            u.component(2),
            v.component(0),
            v.component(1),
            v.component(2),
        ],
        k_in,
        m,
    );
    let out = match kind {
        Bilinear::Componentwise => ev.map_to_spectral(3, k_keep, |a, o| {
            o[0] = a[0] * a[3];
            o[1] = a[1] * a[4];
            o[2] = a[2] * a[5];
        }),
        Bilinear::Cross => ev.map_to_spectral(3, k_keep, |a, o| {
            o[0] = a[1] * a[5] - a[2] * a[4];
            o[1] = a[2] * a[3] - a[0] * a[5];
            o[2] = a[0] * a[4] - a[1] * a[3];
        }),
    };
    Ok(assemble(grid, out))
}

/// `cross * (u × Δu) - cubic * |u|² u`, keeping modes `|k_i| <= k_out`.
pub(crate) fn llb_nonlinearity(
    u: &SpectralField,
    cross: f64,
    cubic: f64,
    k_out: usize,
) -> Result<SpectralField, SpectralError> {
    ensure_real(u)?;
    let lap = apply_laplacian(u);
    let grid = *u.grid();
    let k_in = u.support_radius().min(full_keep(&grid));
    let k_keep = k_out.min(full_keep(&grid)).min(3 * k_in);
    let m = dealias_size(k_in, k_keep, 3);
    let ev = PaddedEval::new(
        grid,
        &[
            u.component(0),
            u.component(1),
            u.component(2),
            lap.component(0),
            lap.component(1),
            lap.component(2),
        ],
        k_in,
        m,
    );
    let out = ev.map_to_spectral(3, k_keep, |v, o| {
        let s = cubic * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        o[0] = cross * (v[1] * v[5] - v[2] * v[4]) - s * v[0];
        o[1] = cross * (v[2] * v[3] - v[0] * v[5]) - s * v[1];
        o[2] = cross * (v[0] * v[4] - v[1] * v[3]) - s * v[2];
    });
    Ok(assemble(grid, out))
}

/// `∫ |u|^4 dx`, exact for band-limited `u`.
pub fn l4_fourth_power(u: &SpectralField) -> Result<f64, SpectralError> {
    ensure_real(u)?;
    let grid = *u.grid();
    let k_in = u.support_radius().min(full_keep(&grid));
    let m = quadrature_size(k_in, 4);
    let ev = PaddedEval::new(grid, &[u.component(0), u.component(1), u.component(2)], k_in, m);
    let mut s = 0.0;
    ev.for_each_point(|v| {
        let q = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        s += q * q;
    });
    Ok(s * grid.volume() / ev.points() as f64)
}

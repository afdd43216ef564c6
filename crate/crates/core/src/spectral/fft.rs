//! Pruned 3D complex FFT on an `m^3` cube.
//!
//! Axis passes skip lines that are known to be zero on input (inverse) or
//! whose results are discarded (forward). Both directions are unnormalized.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

const LINE_BATCH: usize = 32;

pub(crate) struct Fft3 {
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

/// Cached plan for cube size `m`.
pub(crate) fn plan(m: usize) -> Arc<Fft3> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(m)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let fwd = planner.plan_fft_forward(m);
            let inv = planner.plan_fft_inverse(m);
            let scratch_len = fwd
                .get_inplace_scratch_len()
                .max(inv.get_inplace_scratch_len());
            Arc::new(Fft3 { m, fwd, inv, scratch_len })
        })
        .clone()
}

/// Indices `0..=k` and `m-k..m` of an `m`-point axis (all indices if `2k+1 >= m`).
pub(crate) fn box_indices(m: usize, k: usize) -> Vec<usize> {
    if 2 * k + 1 >= m {
        return (0..m).collect();
    }
    (0..=k).chain(m - k..m).collect()
}

/// Smallest even 2-3-5-smooth integer not below `x`.
pub(crate) fn smooth_size(x: usize) -> usize {
    let mut m = x.max(4);
    loop {
        if m % 2 == 0 {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r == 1 {
                return m;
            }
        }
        m += 1;
    }
}

impl Fft3 {
    /// Inverse transform of data supported on `sel x sel x sel`.
    pub(crate) fn inverse(&self, data: &mut [Complex64], sel: &[usize]) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m * m);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        let mut buf = vec![Complex64::new(0.0, 0.0); LINE_BATCH * m];
        if sel.len() == m {
            self.inv.process_with_scratch(data, &mut scratch);
        } else {
            for &i1 in sel {
                for &i2 in sel {
                    let off = (i1 * m + i2) * m;
                    self.inv
                        .process_with_scratch(&mut data[off..off + m], &mut scratch);
                }
            }
        }
        for &i1 in sel {
            let starts: Vec<usize> = (0..m).map(|i3| i1 * m * m + i3).collect();
            transform_lines(data, &starts, m, m, &*self.inv, &mut buf, &mut scratch);
        }
        let starts: Vec<usize> = (0..m * m).collect();
        transform_lines(data, &starts, m * m, m, &*self.inv, &mut buf, &mut scratch);
    }

    /// Forward transform whose output is only needed on `sel x sel x sel`.
    pub(crate) fn forward(&self, data: &mut [Complex64], sel: &[usize]) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m * m);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        let mut buf = vec![Complex64::new(0.0, 0.0); LINE_BATCH * m];
        self.fwd.process_with_scratch(data, &mut scratch);
        for i1 in 0..m {
            let starts: Vec<usize> = sel.iter().map(|&i3| i1 * m * m + i3).collect();
            transform_lines(data, &starts, m, m, &*self.fwd, &mut buf, &mut scratch);
        }
        let mut starts = Vec::with_capacity(sel.len() * sel.len());
        for &i2 in sel {
            for &i3 in sel {
                starts.push(i2 * m + i3);
            }
        }
        transform_lines(data, &starts, m * m, m, &*self.fwd, &mut buf, &mut scratch);
    }
}

/// Transforms the strided lines `start + t*stride`, `t in 0..m`, batch by batch.
fn transform_lines(
    data: &mut [Complex64],
    starts: &[usize],
    stride: usize,
    m: usize,
    fft: &dyn Fft<f64>,
    buf: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    for chunk in starts.chunks(LINE_BATCH) {
        let len = chunk.len() * m;
        let b = &mut buf[..len];
        for t in 0..m {
            let base = t * stride;
            for (l, &s) in chunk.iter().enumerate() {
                b[l * m + t] = data[s + base];
            }
        }
        fft.process_with_scratch(b, scratch);
        for t in 0..m {
            let base = t * stride;
            for (l, &s) in chunk.iter().enumerate() {
                data[s + base] = b[l * m + t];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(data: &[Complex64], m: usize, sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); m * m * m];
        let w = |a: usize, b: usize| {
            Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * (a * b % m) as f64 / m as f64)
        };
        for k1 in 0..m {
            for k2 in 0..m {
                for k3 in 0..m {
                    let mut s = Complex64::new(0.0, 0.0);
                    for x1 in 0..m {
                        for x2 in 0..m {
                            for x3 in 0..m {
                                s += data[(x1 * m + x2) * m + x3] * w(k1, x1) * w(k2, x2) * w(k3, x3);
                            }
                        }
                    }
                    out[(k1 * m + k2) * m + k3] = s;
                }
            }
        }
        out
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(125), 128);
        assert_eq!(smooth_size(33), 36);
        assert_eq!(smooth_size(1), 4);
        assert_eq!(smooth_size(61), 64);
        assert_eq!(smooth_size(19), 20);
    }

    #[test]
    fn pruned_inverse_matches_naive() {
        let m = 6;
        let sel = box_indices(m, 1);
        let mut data = vec![Complex64::new(0.0, 0.0); m * m * m];
        let mut v = 0.3;
        for &a in &sel {
            for &b in &sel {
                for &c in &sel {
                    v = (v * 7.13 + 0.17) % 1.0;
                    data[(a * m + b) * m + c] = Complex64::new(v, 0.5 - v);
                }
            }
        }
        let expect = naive_dft(&data, m, 1.0);
        plan(m).inverse(&mut data, &sel);
        for (a, b) in data.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn pruned_forward_matches_naive_on_box() {
        let m = 6;
        let sel = box_indices(m, 1);
        let data: Vec<Complex64> = (0..m * m * m)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let expect = naive_dft(&data, m, -1.0);
        let mut d = data.clone();
        plan(m).forward(&mut d, &sel);
        for &a in &sel {
            for &b in &sel {
                for &c in &sel {
                    let i = (a * m + b) * m + c;
                    assert!((d[i] - expect[i]).norm() < 1e-11);
                }
            }
        }
    }
}

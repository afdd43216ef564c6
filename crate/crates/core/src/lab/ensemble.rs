use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::littlewood_paley::DyadicPartition;
use crate::spectral::SpectralField;

use super::LabError;

/// Spectral shape of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Spectrum {
    /// Weights `phi(2^{-j}|k|)`.
    SingleBlock { j: i32 },
    /// Weights `sum_{j_lo <= q <= j_hi} phi(2^{-q}|k|)`.
    Band { j_lo: i32, j_hi: i32 },
    /// Weights `|k|^{-alpha}` on every nonzero mode.
    PowerLaw { alpha: f64 },
}

/// Recipe for a deterministic ensemble of random real fields.
///
/// Coefficients are complex Gaussians shaped by [`Spectrum`], with the mean
/// and Nyquist modes left at zero. Each sample is rescaled so its RMS value
/// equals `amplitude`. `max_wavenumber` optionally zeroes modes with larger `|k|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEnsembleSpec {
    pub count: usize,
    pub spectrum: Spectrum,
    pub amplitude: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_wavenumber: Option<f64>,
}

/// SplitMix64 finalizer.
pub fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index`, regeneration `attempt`.
pub fn sample_seed(seed: u64, index: usize, attempt: u32) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ index as u64) ^ ((attempt as u64) << 32 | 0x5eed))
}

impl FieldEnsembleSpec {
    pub fn new(count: usize, spectrum: Spectrum, amplitude: f64, seed: u64) -> Self {
        FieldEnsembleSpec { count, spectrum, amplitude, seed, max_wavenumber: None }
    }

    pub fn band_limited(mut self, k: f64) -> Self {
        self.max_wavenumber = Some(k);
        self
    }

    pub fn with_count(&self, count: usize) -> Self {
        FieldEnsembleSpec { count, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        FieldEnsembleSpec { seed, ..self.clone() }
    }

    pub fn with_spectrum(&self, spectrum: Spectrum) -> Self {
        FieldEnsembleSpec { spectrum, ..self.clone() }
    }

    pub fn validate(&self, p: &DyadicPartition) -> Result<(), LabError> {
        if self.count == 0 {
            return Err(LabError::InvalidSpec("count must be at least 1".into()));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(LabError::InvalidSpec("amplitude must be positive".into()));
        }
        let in_range = |j: i32| j >= p.j_min() && j <= p.j_max();
        match self.spectrum {
            Spectrum::SingleBlock { j } if !in_range(j) => Err(LabError::InvalidSpec(format!(
                "block {j} outside [{}, {}]",
                p.j_min(),
                p.j_max()
            ))),
            Spectrum::Band { j_lo, j_hi } if !(in_range(j_lo) && in_range(j_hi) && j_lo <= j_hi) => {
                Err(LabError::InvalidSpec(format!("band [{j_lo}, {j_hi}] invalid")))
            }
            Spectrum::PowerLaw { alpha } if !alpha.is_finite() => {
                Err(LabError::InvalidSpec("alpha must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    fn weight(&self, p: &DyadicPartition, idx: usize) -> f64 {
        let g = p.grid();
        let k2 = g.k_squared(idx);
        if let Some(kmax) = self.max_wavenumber {
            if k2 > kmax * kmax {
                return 0.0;
            }
        }
        match self.spectrum {
            Spectrum::SingleBlock { j } => p.weight(j, idx),
            Spectrum::Band { j_lo, j_hi } => (j_lo..=j_hi).map(|q| p.weight(q, idx)).sum(),
            Spectrum::PowerLaw { alpha } => k2.powf(-0.5 * alpha),
        }
    }

    /// Sample `index` at regeneration `attempt`, with the seed that produced it.
    pub fn sample(&self, p: &DyadicPartition, index: usize, attempt: u32) -> (SpectralField, u64) {
        let s = sample_seed(self.seed, index, attempt);
        (self.sample_from_seed(p, s), s)
    }

    pub fn sample_from_seed(&self, p: &DyadicPartition, s: u64) -> SpectralField {
        let g = *p.grid();
        let np = g.points();
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 3 * np];
        for idx in 1..np {
            let conj = g.conjugate_index(idx);
            if conj <= idx || g.is_nyquist(idx) {
                continue;
            }
            let w = self.weight(p, idx);
            if w == 0.0 {
                continue;
            }
            for c in 0..3 {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let z = Complex64::new(re, im) * w;
                coeffs[c * np + idx] = z;
                coeffs[c * np + conj] = z.conj();
            }
        }
        let f = SpectralField::from_coeffs(g, coeffs, true).expect("hermitian by construction");
        let rms = (f.l2_norm_squared() / g.volume()).sqrt();
        if rms == 0.0 {
            f
        } else {
            f.scale(self.amplitude / rms)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn samples_are_deterministic_real_and_normalized() {
        let p = DyadicPartition::build(Grid::periodic(16).unwrap()).unwrap();
        let spec = FieldEnsembleSpec::new(3, Spectrum::PowerLaw { alpha: 2.0 }, 0.5, 9);
        let (a, sa) = spec.sample(&p, 1, 0);
        let (b, sb) = spec.sample(&p, 1, 0);
        assert_eq!(sa, sb);
        assert_eq!(a, b);
        assert!(a.hermitian_defect() == 0.0);
        assert_eq!(a.mean(), [0.0; 3]);
        let rms = (a.l2_norm_squared() / p.grid().volume()).sqrt();
        assert!((rms - 0.5).abs() < 1e-12);
        let (c, _) = spec.sample(&p, 2, 0);
        assert_ne!(a, c);
    }

    #[test]
    fn single_block_support() {
        let p = DyadicPartition::build(Grid::periodic(16).unwrap()).unwrap();
        let spec = FieldEnsembleSpec::new(1, Spectrum::SingleBlock { j: 1 }, 1.0, 1);
        let (f, _) = spec.sample(&p, 0, 0);
        let g = p.grid();
        for idx in 0..g.points() {
            let r = g.k_squared(idx).sqrt();
            if !(1.5 < r && r < 16.0 / 3.0) {
                assert_eq!(f.coeffs()[idx].norm(), 0.0);
            }
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = FieldEnsembleSpec::new(4, Spectrum::Band { j_lo: 0, j_hi: 2 }, 1.0, 3).band_limited(8.0);
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"family\":\"band\""));
        let back: FieldEnsembleSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}

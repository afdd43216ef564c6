use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::spectral::{to_physical_fast, PhysicalField, SpectralField};

use super::partition::DyadicPartition;
use super::LpError;

/// `Δ̇_j f`.
pub fn dyadic_block(f: &SpectralField, j: i32, p: &DyadicPartition) -> Result<SpectralField, LpError> {
    p.check_grid(f)?;
    p.check_index(j, p.j_max())?;
    Ok(f.map_multiplier(|idx| p.weight(j, idx)))
}

/// `Ṡ_j f = sum of Δ̇_{j'} f over j_min <= j' <= j - 1`.
pub fn low_freq_cutoff(f: &SpectralField, j: i32, p: &DyadicPartition) -> Result<SpectralField, LpError> {
    p.check_grid(f)?;
    p.check_index(j, p.j_max() + 1)?;
    Ok(f.map_multiplier(|idx| low_weight(p, j, idx)))
}

#[inline]
pub(crate) fn low_weight(p: &DyadicPartition, j: i32, idx: usize) -> f64 {
    let m = p.mode(idx);
    let mut s = 0.0;
    if m.j0 < j {
        s += m.w[0];
    }
    if m.j0 + 1 < j {
        s += m.w[1];
    }
    s
}

/// Inhomogeneous block `q` (`q = -1` is the low-frequency `chi` block).
pub fn inhomogeneous_block(f: &SpectralField, q: i32, p: &DyadicPartition) -> Result<SpectralField, LpError> {
    p.check_grid(f)?;
    if q < -1 || q > p.j_max() {
        return Err(LpError::IndexOutOfRange { j: q, lo: -1, hi: p.j_max() });
    }
    Ok(f.map_multiplier(|idx| p.inhomogeneous_weight(q, idx)))
}

/// `‖Δ̇_j f‖_{L²}` for every `j` in `[j_min, j_max]`, in one pass.
pub fn block_l2_norms(f: &SpectralField, p: &DyadicPartition) -> Vec<f64> {
    let g = f.grid();
    let np = g.points();
    let jm = p.j_min();
    let mut acc = vec![0.0; p.block_count()];
    let c = f.coeffs();
    for idx in 1..np {
        let m = p.mode(idx);
        let e = c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr();
        if e == 0.0 {
            continue;
        }
        let b = (m.j0 - jm) as usize;
        acc[b] += m.w[0] * m.w[0] * e;
        if m.w[1] > 0.0 {
            acc[b + 1] += m.w[1] * m.w[1] * e;
        }
    }
    let vol = g.volume();
    acc.into_iter().map(|a| (a * vol).sqrt()).collect()
}

fn inhomogeneous_l2_norms(f: &SpectralField, p: &DyadicPartition) -> Vec<f64> {
    let g = f.grid();
    let np = g.points();
    let qmax = p.j_max().max(0);
    let mut acc = vec![0.0; (qmax + 2) as usize];
    let c = f.coeffs();
    for idx in 0..np {
        let e = c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr();
        if e == 0.0 {
            continue;
        }
        for q in -1..=qmax {
            let w = p.inhomogeneous_weight(q, idx);
            if w > 0.0 {
                acc[(q + 1) as usize] += w * w * e;
            }
        }
    }
    let vol = g.volume();
    acc.into_iter().map(|a| (a * vol).sqrt()).collect()
}

/// `‖Δ̇_j f‖_{L^p}` for every `j`, through physical space when `p != 2`.
pub fn block_lp_norms(f: &SpectralField, exponent: f64, p: &DyadicPartition) -> Result<Vec<f64>, LpError> {
    p.check_grid(f)?;
    if exponent == 2.0 {
        return Ok(block_l2_norms(f, p));
    }
    crate::spectral::products::ensure_real(f)?;
    let mut out = Vec::with_capacity(p.block_count());
    let l2 = block_l2_norms(f, p);
    for (b, j) in p.indices().enumerate() {
        if l2[b] == 0.0 {
            out.push(0.0);
            continue;
        }
        let blk = f.map_multiplier(|idx| p.weight(j, idx));
        out.push(lebesgue_norm(&to_physical_fast(&blk), exponent));
    }
    Ok(out)
}

/// Besov parameters `(s, p, r)`; infinite exponents serialize as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    #[serde(serialize_with = "ser_ext", deserialize_with = "de_ext")]
    pub p: f64,
    #[serde(serialize_with = "ser_ext", deserialize_with = "de_ext")]
    pub r: f64,
    pub homogeneous: bool,
}

impl BesovParams {
    pub fn homogeneous(s: f64, p: f64, r: f64) -> Self {
        BesovParams { s, p, r, homogeneous: true }
    }

    pub fn inhomogeneous(s: f64, p: f64, r: f64) -> Self {
        BesovParams { s, p, r, homogeneous: false }
    }

    fn validate(&self) -> Result<(), LpError> {
        let ok = |x: f64| x >= 1.0 && !x.is_nan();
        if !(ok(self.p) && ok(self.r) && self.s.is_finite()) {
            return Err(LpError::InvalidArgument(format!(
                "Besov parameters need p, r in [1, inf] and finite s, got {:?}",
                self
            )));
        }
        Ok(())
    }
}

/// Which family a [`NormReport`] measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Besov,
    Sobolev,
}

/// A norm value with its parameters and, for Besov norms, the weighted blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub s: f64,
    #[serde(serialize_with = "ser_ext", deserialize_with = "de_ext")]
    pub p: f64,
    #[serde(serialize_with = "ser_ext", deserialize_with = "de_ext")]
    pub r: f64,
    pub homogeneous: bool,
    pub norm: NormKind,
    pub per_block: Vec<(i32, f64)>,
}

impl NormReport {
    pub fn params(&self) -> BesovParams {
        BesovParams { s: self.s, p: self.p, r: self.r, homogeneous: self.homogeneous }
    }

    /// ℓʳ aggregate of `per_block` with exponent `r`.
    pub fn aggregate(&self, r: f64) -> f64 {
        lr_sum(self.per_block.iter().map(|b| b.1), r)
    }
}

pub(crate) fn lr_sum(xs: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        xs.fold(0.0, f64::max)
    } else if r == 1.0 {
        xs.sum()
    } else {
        xs.map(|x| x.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `(sum_j 2^{rjs} ‖Δ̇_j f‖^r_{L^p})^{1/r}` over the grid's dyadic range.
pub fn besov_norm(f: &SpectralField, params: BesovParams, p: &DyadicPartition) -> Result<NormReport, LpError> {
    params.validate()?;
    p.check_grid(f)?;
    let (labels, norms): (Vec<i32>, Vec<f64>) = if params.homogeneous {
        (p.indices().collect(), block_lp_norms(f, params.p, p)?)
    } else {
        let qs: Vec<i32> = (-1..=p.j_max().max(0)).collect();
        let norms = if params.p == 2.0 {
            inhomogeneous_l2_norms(f, p)
        } else {
            crate::spectral::products::ensure_real(f)?;
            let mut v = Vec::with_capacity(qs.len());
            for &q in &qs {
                let blk = f.map_multiplier(|idx| p.inhomogeneous_weight(q, idx));
                v.push(lebesgue_norm(&to_physical_fast(&blk), params.p));
            }
            v
        };
        (qs, norms)
    };
    Ok(report_from_blocks(params, &labels, &norms))
}

pub(crate) fn report_from_blocks(params: BesovParams, labels: &[i32], norms: &[f64]) -> NormReport {
    let per_block: Vec<(i32, f64)> = labels
        .iter()
        .zip(norms)
        .map(|(&j, &n)| (j, 2f64.powf(j as f64 * params.s) * n))
        .collect();
    let value = lr_sum(per_block.iter().map(|b| b.1), params.r);
    NormReport {
        value,
        s: params.s,
        p: params.p,
        r: params.r,
        homogeneous: params.homogeneous,
        norm: NormKind::Besov,
        per_block,
    }
}

/// Homogeneous Besov norm with `p = 2` from precomputed block norms.
pub fn besov_from_l2_blocks(blocks: &[f64], s: f64, r: f64, p: &DyadicPartition) -> f64 {
    lr_sum(
        p.indices()
            .zip(blocks)
            .map(|(j, &n)| 2f64.powf(j as f64 * s) * n),
        r,
    )
}

/// `Ḣˢ` (weight `|k|^{2s}`, mean excluded) or `Hˢ` (weight `(1+|k|²)^s`).
pub fn sobolev_norm(f: &SpectralField, s: f64, homogeneous: bool) -> Result<NormReport, LpError> {
    let g = f.grid();
    let np = g.points();
    if homogeneous && s < 0.0 && f.mean() != [0.0, 0.0, 0.0] {
        return Err(LpError::InvalidArgument(
            "negative homogeneous Sobolev index needs a mean-free field".into(),
        ));
    }
    let c = f.coeffs();
    let mut acc = 0.0;
    for idx in 0..np {
        let k2 = g.k_squared(idx);
        let w = if homogeneous {
            if idx == 0 {
                0.0
            } else {
                k2.powf(s)
            }
        } else {
            (1.0 + k2).powf(s)
        };
        acc += w * (c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr());
    }
    Ok(NormReport {
        value: (acc * g.volume()).sqrt(),
        s,
        p: 2.0,
        r: 2.0,
        homogeneous,
        norm: NormKind::Sobolev,
        per_block: Vec::new(),
    })
}

/// `(∫ |f(x)|^p dx)^{1/p}` by uniform quadrature; `p = inf` is the grid max.
///
/// `|f(x)|` is the Euclidean length of the vector value.
pub fn lebesgue_norm(f: &PhysicalField, p: f64) -> f64 {
    let g = f.grid();
    let np = g.points();
    let v = f.values();
    let mag2 = |i: usize| v[i] * v[i] + v[np + i] * v[np + i] + v[2 * np + i] * v[2 * np + i];
    if p.is_infinite() {
        return (0..np).map(mag2).fold(0.0, f64::max).sqrt();
    }
    let sum: f64 = if p == 2.0 {
        (0..np).map(mag2).sum()
    } else {
        (0..np).map(|i| mag2(i).powf(0.5 * p)).sum()
    };
    (sum * g.cell_volume()).powf(1.0 / p)
}

fn ser_ext<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

fn de_ext<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Ext {
        Num(f64),
        Str(String),
    }
    match Ext::deserialize(d)? {
        Ext::Num(x) => Ok(x),
        Ext::Str(s) if s == "inf" => Ok(f64::INFINITY),
        Ext::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::super::partition::phi;
    use super::*;
    use crate::spectral::Grid;

    fn setup() -> (DyadicPartition, SpectralField) {
        let g = Grid::periodic(32).unwrap();
        let p = DyadicPartition::build(g).unwrap();
        let u = SpectralField::with_mode(g, 0, [8, 0, 0], 1.0, 0.0).unwrap();
        (p, u)
    }

    #[test]
    fn mode_eight_lives_in_blocks_two_and_three() {
        let (p, u) = setup();
        for j in p.indices() {
            let b = dyadic_block(&u, j, &p).unwrap();
            assert_eq!(b.max_abs_coeff() > 0.0, j == 2 || j == 3, "j={j}");
        }
        let s = &dyadic_block(&u, 2, &p).unwrap() + &dyadic_block(&u, 3, &p).unwrap();
        assert!((&s - &u).max_abs_coeff() < 1e-15);
        assert!(dyadic_block(&u, p.j_max() + 1, &p).is_err());
    }

    #[test]
    fn besov_single_mode_values() {
        let (p, u) = setup();
        let l2 = u.l2_norm();
        let b0 = besov_norm(&u, BesovParams::homogeneous(0.0, 2.0, 1.0), &p).unwrap();
        assert!((b0.value - l2).abs() < 1e-10 * l2);
        let b2 = besov_norm(&u, BesovParams::homogeneous(2.0, 2.0, 1.0), &p).unwrap();
        let expect = (16.0 * phi(2.0) + 64.0 * phi(1.0)) * l2;
        assert!((b2.value - expect).abs() < 1e-10 * expect);
        assert!((b2.aggregate(1.0) - b2.value).abs() < 1e-12 * b2.value);
        let bp = besov_norm(&u, BesovParams::homogeneous(0.0, 3.0, 1.0), &p).unwrap();
        assert!(bp.value > 0.0);
    }

    #[test]
    fn low_freq_cutoff_ends() {
        let (p, u) = setup();
        assert_eq!(low_freq_cutoff(&u, p.j_min(), &p).unwrap().max_abs_coeff(), 0.0);
        let all = low_freq_cutoff(&u, p.j_max() + 1, &p).unwrap();
        assert!((&all - &u).max_abs_coeff() < 1e-15);
        let s5 = low_freq_cutoff(&u, 5, &p).unwrap();
        assert!((&s5 - &u).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn report_json_is_flat() {
        let (p, u) = setup();
        let r = besov_norm(&u, BesovParams::homogeneous(0.5, 2.0, f64::INFINITY), &p).unwrap();
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["r"], "inf");
        assert_eq!(js["per_block"][0][0], p.j_min());
        let back: NormReport = serde_json::from_value(js).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn sobolev_and_lebesgue_examples() {
        let g = Grid::periodic(16).unwrap();
        let u = SpectralField::with_mode(g, 1, [0, 2, 0], 1.0, 0.0).unwrap();
        let h = sobolev_norm(&u, 1.0, true).unwrap();
        assert!((h.value - 2.0 * u.l2_norm()).abs() < 1e-12);
        let c = SpectralField::constant(g, [2.0, 0.0, 0.0]);
        assert_eq!(sobolev_norm(&c, 1.0, true).unwrap().value, 0.0);
        let phys = crate::spectral::inverse_transform(&c).unwrap();
        let l4 = lebesgue_norm(&phys, 4.0);
        let expect = 2.0 * (2.0 * std::f64::consts::PI).powf(0.75);
        assert!((l4 - expect).abs() < 1e-12 * expect);
    }
}

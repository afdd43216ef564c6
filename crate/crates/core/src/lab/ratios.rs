//! Per-sample ratios of the two sides of each inequality.
//!
//! Every function returns `Ok(None)` when a denominator falls below
//! [`DEGENERATE_THRESHOLD`].

use crate::littlewood_paley::{
    block_l2_norms, block_lp_norms, dyadic_block, lebesgue_norm, lr_sum, sobolev_norm,
    DyadicPartition, PHI_INNER,
};
use crate::spectral::products::{ensure_real, full_keep, quadrature_size, PaddedEval};
use crate::spectral::{
    apply_laplacian, partial_derivative, pointwise_cubic, product, to_physical_fast, Bilinear,
    SpectralField,
};

use super::LabError;

pub const DEGENERATE_THRESHOLD: f64 = 1e-14;

fn guard(num: f64, den: f64) -> Option<f64> {
    if den.abs() < DEGENERATE_THRESHOLD {
        None
    } else {
        Some(num / den)
    }
}

fn besov(blocks: &[f64], s: f64, r: f64, p: &DyadicPartition) -> f64 {
    lr_sum(
        p.indices().zip(blocks).map(|(j, &b)| 2f64.powf(j as f64 * s) * b),
        r,
    )
}

/// `‖f‖_{L^∞}` on the native grid.
pub fn sup_norm(f: &SpectralField) -> f64 {
    lebesgue_norm(&to_physical_fast(f), f64::INFINITY)
}

/// `L^p` norm of the Jacobian `∇f` (Frobenius length at each point).
pub fn gradient_lp(f: &SpectralField, exponent: f64) -> f64 {
    let g = *f.grid();
    let np = g.points();
    let mut mag2 = vec![0.0; np];
    for axis in 0..3 {
        let d = to_physical_fast(&partial_derivative(f, axis));
        for (i, m) in mag2.iter_mut().enumerate() {
            let v = d.at(i);
            *m += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        }
    }
    if exponent.is_infinite() {
        return mag2.into_iter().fold(0.0, f64::max).sqrt();
    }
    let sum: f64 = mag2.iter().map(|m| m.powf(0.5 * exponent)).sum();
    (sum * g.cell_volume()).powf(1.0 / exponent)
}

/// Sample constant `-(1/(p-1)) ∫ Δu·u|u|^{p-2} / (R1²/p² ∫|u|^p)` after
/// restricting `u` to block `j`, with `R1 = 2^j · 3/4`.
pub fn bernstein_constant(
    u: &SpectralField,
    exponent: f64,
    j: i32,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    if !(exponent > 1.0 && exponent.is_finite()) {
        return Err(LabError::InvalidArgument(format!("p must lie in (1, inf), got {exponent}")));
    }
    let ub = dyadic_block(u, j, p)?;
    let (lp, rhs) = bernstein_integrals(&ub, exponent)?;
    let r1 = 2f64.powi(j) * PHI_INNER;
    let lhs_coeff = r1 * r1 / (exponent * exponent);
    Ok(guard(rhs, lhs_coeff * lp))
}

/// `(∫|u|^p dx, -(1/(p-1)) ∫ Δu·u |u|^{p-2} dx)` by quadrature on a grid
/// fine enough to integrate even-integer powers exactly.
pub fn bernstein_integrals(u: &SpectralField, exponent: f64) -> Result<(f64, f64), LabError> {
    ensure_real(u)?;
    let grid = *u.grid();
    let lap = apply_laplacian(u);
    let k_in = u.support_radius().min(full_keep(&grid));
    let deg = (exponent.ceil() as usize).max(2);
    let m = quadrature_size(k_in, deg);
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
    let even = exponent == exponent.round() && (exponent as i64) % 2 == 0;
    let mut lp = 0.0;
    let mut rhs = 0.0;
    ev.for_each_point(|v| {
        let m2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if m2 == 0.0 {
            return;
        }
        let (up, upm2) = if even {
            let h = (exponent as i32) / 2;
            (m2.powi(h), m2.powi(h - 1))
        } else {
            (m2.powf(0.5 * exponent), m2.powf(0.5 * exponent - 1.0))
        };
        lp += up;
        rhs += (v[3] * v[0] + v[4] * v[1] + v[5] * v[2]) * upm2;
    });
    let w = grid.volume() / ev.points() as f64;
    Ok((lp * w, -rhs * w / (exponent - 1.0)))
}

/// `‖f‖_{Ḃ^{θs1+(1-θ)s2}} / (‖f‖^θ_{Ḃ^{s1}} ‖f‖^{1-θ}_{Ḃ^{s2}})` with common `(p, r)`.
pub fn interpolation_ratio(
    f: &SpectralField,
    s1: f64,
    s2: f64,
    theta: f64,
    exponent: f64,
    r: f64,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    let blocks = block_lp_norms(f, exponent, p)?;
    let mid = besov(&blocks, theta * s1 + (1.0 - theta) * s2, r, p);
    let a = besov(&blocks, s1, r, p);
    let b = besov(&blocks, s2, r, p);
    Ok(guard(mid, a.powf(theta) * b.powf(1.0 - theta)))
}

/// `‖uv‖_{Ḃ^{s1+s2-3/p}_{p,1}} / (‖u‖_{Ḃ^{s1}_{p,1}} ‖v‖_{Ḃ^{s2}_{p,1}})`, componentwise product.
pub fn product_ratio(
    u: &SpectralField,
    v: &SpectralField,
    s1: f64,
    s2: f64,
    exponent: f64,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    let d = 3.0;
    if s1 > d / exponent || s2 > d / exponent || s1 + s2 <= d * (2.0 / exponent - 1.0).max(0.0) {
        return Err(LabError::InvalidArgument(format!(
            "product estimate needs s1, s2 <= 3/p and s1 + s2 > 3 max(0, 2/p - 1); got s1={s1}, s2={s2}, p={exponent}"
        )));
    }
    let uv = product(u, v, Bilinear::Componentwise)?;
    let lhs = besov(&block_lp_norms(&uv, exponent, p)?, s1 + s2 - d / exponent, 1.0, p);
    let nu = besov(&block_lp_norms(u, exponent, p)?, s1, 1.0, p);
    let nv = besov(&block_lp_norms(v, exponent, p)?, s2, 1.0, p);
    Ok(guard(lhs, nu * nv))
}

/// `‖fg‖_{Ḃ^s_{p,r}} / (‖f‖_∞ ‖g‖_{Ḃ^s_{p,r}} + ‖g‖_∞ ‖f‖_{Ḃ^s_{p,r}})`.
pub fn algebra_ratio(
    f: &SpectralField,
    g: &SpectralField,
    s: f64,
    exponent: f64,
    r: f64,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    if s <= 0.0 {
        return Err(LabError::InvalidArgument("algebra estimate needs s > 0".into()));
    }
    let fg = product(f, g, Bilinear::Componentwise)?;
    let lhs = besov(&block_lp_norms(&fg, exponent, p)?, s, r, p);
    let bf = besov(&block_lp_norms(f, exponent, p)?, s, r, p);
    let bg = besov(&block_lp_norms(g, exponent, p)?, s, r, p);
    Ok(guard(lhs, sup_norm(f) * bg + sup_norm(g) * bf))
}

fn lp_of(f: &SpectralField, exponent: f64) -> f64 {
    if exponent == 2.0 {
        f.l2_norm()
    } else {
        lebesgue_norm(&to_physical_fast(f), exponent)
    }
}

/// `‖[Δ̇_j, a] b‖_{L^r} / (2^{-j} ‖∇a‖_{L^p} ‖b‖_{L^q})` with `1/p + 1/q = 1/r`.
pub fn commutator_basic_ratio(
    a: &SpectralField,
    b: &SpectralField,
    j: i32,
    pq_r: (f64, f64, f64),
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    let (pe, qe, re) = pq_r;
    if ((1.0 / pe + 1.0 / qe) - 1.0 / re).abs() > 1e-12 {
        return Err(LabError::InvalidArgument(format!(
            "exponents need 1/p + 1/q = 1/r, got ({pe}, {qe}, {re})"
        )));
    }
    let c = crate::littlewood_paley::block_commutator(a, b, j, p)?;
    let lhs = lp_of(&c, re);
    let rhs = 2f64.powi(-j) * gradient_lp(a, pe) * lp_of(b, qe);
    Ok(guard(lhs, rhs))
}

/// Left and right sides of the weighted commutator sum
/// `sum_j 2^{js} ‖[Δ̇_j, b] a‖_{L²}` against
/// `‖a‖_{Ḃ^{s-2/ρ}_{2,1}} ‖b‖_{Ḃ^{2/ρ}_{∞,∞}} + ‖b‖_{Ḃ^{s+1-2/ρ}_{2,1}} ‖a‖_{Ḃ^{2/ρ}_{∞,∞}}`.
pub fn commutator_lemma_sides(
    a: &SpectralField,
    b: &SpectralField,
    s: f64,
    rho: f64,
    p: &DyadicPartition,
) -> Result<(f64, f64), LabError> {
    if !(s > 0.0 && rho > 2.0) {
        return Err(LabError::InvalidArgument(format!(
            "weighted commutator sum needs s > 0 and rho > 2, got s={s}, rho={rho}"
        )));
    }
    let ba = product(b, a, Bilinear::Componentwise)?;
    let a_l2 = block_l2_norms(a, p);
    let mut lhs = 0.0;
    for (bi, j) in p.indices().enumerate() {
        let first = dyadic_block(&ba, j, p)?;
        let term = if a_l2[bi] == 0.0 {
            first
        } else {
            &first - &product(b, &dyadic_block(a, j, p)?, Bilinear::Componentwise)?
        };
        lhs += 2f64.powf(j as f64 * s) * term.l2_norm();
    }
    let t = 2.0 / rho;
    let b_l2 = block_l2_norms(b, p);
    let a_inf = block_lp_norms(a, f64::INFINITY, p)?;
    let b_inf = block_lp_norms(b, f64::INFINITY, p)?;
    let rhs = besov(&a_l2, s - t, 1.0, p) * besov(&b_inf, t, f64::INFINITY, p)
        + besov(&b_l2, s + 1.0 - t, 1.0, p) * besov(&a_inf, t, f64::INFINITY, p);
    Ok((lhs, rhs))
}

pub fn commutator_lemma_ratio(
    a: &SpectralField,
    b: &SpectralField,
    s: f64,
    rho: f64,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    let (lhs, rhs) = commutator_lemma_sides(a, b, s, rho, p)?;
    Ok(guard(lhs, rhs))
}

/// `∂^α f` for a multi-index `α`.
pub fn derivative(f: &SpectralField, alpha: [u32; 3]) -> SpectralField {
    let mut out = f.clone();
    for (axis, &n) in alpha.iter().enumerate() {
        for _ in 0..n {
            out = partial_derivative(&out, axis);
        }
    }
    out
}

/// `‖∂^α(fg) - f ∂^α g‖_{L²} / (‖D¹f‖_∞ ‖D^{m-1}g‖_{L²} + ‖g‖_∞ ‖D^m f‖_{L²})`.
pub fn moser_ratio(
    f: &SpectralField,
    g: &SpectralField,
    m: u32,
    alpha: [u32; 3],
) -> Result<Option<f64>, LabError> {
    let order: u32 = alpha.iter().sum();
    if m < 2 || order > m {
        return Err(LabError::InvalidArgument(format!(
            "Moser estimate needs m >= 2 and |alpha| <= m, got m={m}, alpha={alpha:?}"
        )));
    }
    let fg = product(f, g, Bilinear::Componentwise)?;
    let lhs = &derivative(&fg, alpha) - &product(f, &derivative(g, alpha), Bilinear::Componentwise)?;
    let d_m1 = sobolev_norm(g, (m - 1) as f64, true)?.value;
    let d_m = sobolev_norm(f, m as f64, true)?.value;
    let rhs = gradient_lp(f, f64::INFINITY) * d_m1 + sup_norm(g) * d_m;
    Ok(guard(lhs.l2_norm(), rhs))
}

/// `(‖|u|²u‖_{Ḃ^s_{2,1}} / ‖u‖_{Ḃ^s_{2,1}}, ‖u‖_∞)`.
pub fn composition_ratio(
    u: &SpectralField,
    s: f64,
    p: &DyadicPartition,
) -> Result<Option<(f64, f64)>, LabError> {
    let fu = pointwise_cubic(u)?;
    let lhs = besov(&block_l2_norms(&fu, p), s, 1.0, p);
    let den = besov(&block_l2_norms(u, p), s, 1.0, p);
    Ok(guard(lhs, den).map(|r| (r, sup_norm(u))))
}

/// `‖∇f‖_{Ḃ^s_{2,1}} / ‖f‖_{Ḃ^{s+1}_{2,1}}`.
pub fn derivative_equivalence_ratio(
    f: &SpectralField,
    s: f64,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    let g = *f.grid();
    let grad_blocks = {
        let np = g.points();
        let jm = p.j_min();
        let mut acc = vec![0.0; p.block_count()];
        let c = f.coeffs();
        for idx in 1..np {
            let e = g.k_squared(idx)
                * (c[idx].norm_sqr() + c[np + idx].norm_sqr() + c[2 * np + idx].norm_sqr());
            for j in p.indices() {
                let w = p.weight(j, idx);
                if w > 0.0 {
                    acc[(j - jm) as usize] += w * w * e;
                }
            }
        }
        acc.into_iter().map(|a| (a * g.volume()).sqrt()).collect::<Vec<_>>()
    };
    let lhs = besov(&grad_blocks, s, 1.0, p);
    let rhs = besov(&block_l2_norms(f, p), s + 1.0, 1.0, p);
    Ok(guard(lhs, rhs))
}

/// `‖f‖_{Ḃ^{s-3(1/2-1/p)}_{p,1}} / ‖f‖_{Ḃ^s_{2,1}}`.
pub fn embedding_ratio(
    f: &SpectralField,
    s: f64,
    exponent: f64,
    p: &DyadicPartition,
) -> Result<Option<f64>, LabError> {
    let lhs = besov(
        &block_lp_norms(f, exponent, p)?,
        s - 3.0 * (0.5 - 1.0 / exponent),
        1.0,
        p,
    );
    let rhs = besov(&block_l2_norms(f, p), s, 1.0, p);
    Ok(guard(lhs, rhs))
}

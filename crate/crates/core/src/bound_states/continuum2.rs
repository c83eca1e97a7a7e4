//! Bound states in continuum II (two open channels: m = 0 and m = −1):
//! kₓ ∈ (0, π], k ∈ (2π−kₓ, 2π+kₓ), shift restricted to a ∈ {0, ½}.
//!
//! The m = −1 standing wave pins h = nπ/(2k_{z,−1}) and Ψₙ(k) = 0 fixes
//! kₙ(kₓ). The m = 0 standing wave then demands
//!
//! ```text
//! φₙ(kₓ) = 2hₙ√(kₙ² − kₓ²) = nπ·sqrt((kₙ²−kₓ²)/(kₙ²−(2π−kₓ)²)) = lπ,
//! ```
//!
//! which selects the discrete set k_x^{n,l}. The cos(2h k_z) = ±1 pattern of
//! the split systems imposes a parity pairing: at a = 0 the indices must
//! satisfy l ≡ n (mod 2) (plus l = n at kₓ = π, a point of infinite
//! multiplicity), at a = ½ they must differ. Quantization points of the
//! opposite parity are genuine bound states of the complementary shift; the
//! index-density enumeration counts them all.

use super::continuum1::golden_min;
use super::psi::{psi_n_core, psi_n_core_dk};
use super::search::{bisect_root, first_bracket, threshold_refined_grid};
use super::{BoundStateRecord, ExistenceGate, GateKind, Symmetry};
use crate::channels::{reduce_kx, BlochPoint, RegionTag};
use crate::error::{Error, Result};
use crate::lattice_sums::{
    delta0, determinant, guard_thresholds, phi_cs, phi_star, regulated_closed_sum, ArrayConfig,
};
use crate::special::{digamma, hurwitz_zeta_tail};
use crate::DEFAULT_TOL;
use std::f64::consts::PI;

/// Ψₙ of continuum II.
pub fn psi_n_c2(cfg: &ArrayConfig, pt: &BlochPoint, n: u32) -> Result<f64> {
    psi_n_core(cfg, pt, n, true)
}

/// Analytic ∂Ψₙ/∂k (continuum II).
pub fn psi_n_c2_dk(cfg: &ArrayConfig, pt: &BlochPoint, n: u32) -> Result<f64> {
    psi_n_core_dk(cfg, pt, n, true)
}

/// Ψ∞, the pointwise n → ∞ limit of Ψₙ (the exponential terms dropped).
pub fn psi_infinity(cfg: &ArrayConfig, pt: &BlochPoint) -> Result<f64> {
    guard_thresholds(pt)?;
    let (reg, _) = regulated_closed_sum(pt, &[0, -1]);
    Ok(1.0 / (2.0 * PI * delta0(pt.k(), cfg))
        + reg
        + (0.75 + (2.0 * PI * cfg.radius).ln()) / PI)
}

/// The Schlömilch-type constant s ≈ 0.691 of the continuum-II gate,
/// recomputed by direct summation with the telescoped tail.
pub fn schlomilch_constant_s() -> f64 {
    let m_cut = 2_000_000u64;
    let mut s = 0.0;
    for m in 1..=m_cut {
        let mf = m as f64;
        s += 1.0 / (mf * (mf + 1.0)).sqrt() - 0.5 * (1.0 / (mf + 1.0) + 1.0 / (mf + 2.0));
    }
    s + 1.0 / (m_cut as f64 + 1.5)
}

/// The closed-form gate constant C ≈ 2.016 recomputed by 1-D minimization.
pub fn gate_constant_c2() -> f64 {
    let g = |t: f64| {
        let s3 = (3.0 - t).sqrt();
        let st = t.sqrt();
        (2.0 - t) * (2.0 - t) / s3 * (s3 / (1.0 + st) - st / (2.0f64.sqrt() + s3))
    };
    let (_, gmin) = golden_min(g, 0.0, 1.0);
    2.0f64.powf(1.25) * PI.powf(-0.75) / gmin.sqrt()
}

/// Positivity of the k → (2π−kₓ)⁺ limit of Ψₙ: the rearranged nonnegative
/// series (authoritative) plus the closed-form radius precheck
/// R√(ε_c−1) < C·kₓ^{1/4}/√(π−kₓ).
pub fn existence_gate_c2(kx: f64, cfg: &ArrayConfig) -> ExistenceGate {
    let kx = reduce_kx(kx).abs();
    let c2 = gate_constant_c2();
    let rs = cfg.radius * (cfg.eps_c - 1.0).sqrt();
    let precheck = if kx < PI {
        rs < c2 * kx.powf(0.25) / (PI - kx).sqrt()
    } else {
        true
    };
    let lower = 2.0 * PI - kx;
    let lhs = 2.0 / (PI * cfg.radius * cfg.radius * (cfg.eps_c - 1.0) * lower * lower);
    let m_cut = 20_000u64;
    let mut series = 0.0;
    for m in 1..=m_cut {
        let mf = m as f64;
        let x1 = 2.0 * PI * mf + kx;
        let x2 = 2.0 * PI * (mf + 1.0) - kx;
        series += 1.0 / (x1 * x1 - lower * lower).sqrt() + 1.0 / (x2 * x2 - lower * lower).sqrt()
            - 1.0 / (PI * (mf * (mf + 1.0)).sqrt());
    }
    // tail: digamma part of (1/x₁ + 1/x₂ − 2/(2π(m+1/2))), the 1/(8u³)
    // deficit of 1/√(m(m+1)), and the c²/2 Kummer correction of 1/√(x²−c²).
    let mf = m_cut as f64;
    let kappa = kx / (2.0 * PI);
    series += (2.0 * digamma(mf + 1.5) - digamma(mf + 1.0 + kappa) - digamma(mf + 2.0 - kappa))
        / (2.0 * PI);
    series -= hurwitz_zeta_tail(3, mf + 1.5) / (8.0 * PI);
    series += 0.5 * lower * lower / (2.0 * PI).powi(3)
        * (hurwitz_zeta_tail(3, mf + 1.0 + kappa) + hurwitz_zeta_tail(3, mf + 2.0 - kappa));
    let s = schlomilch_constant_s();
    let rhs = series + (s - 0.75 - (2.0 * PI * cfg.radius).ln()) / PI;
    ExistenceGate {
        holds: lhs > rhs,
        lhs,
        rhs,
        kind: GateKind::ContinuumII,
        precheck,
    }
}

fn require_half_or_zero(a: f64) -> Result<()> {
    if a == 0.0 || a == 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "continuum-II bound states require a in {{0, 1/2}}, got {a}"
        )))
    }
}

/// Root kₙ(kₓ) of Ψₙ in q₁ = q_{z,1} ∈ (0, √(8πkₓ)); None when no sign
/// change (Table-1 non-existence).
fn continuum2_root(cfg: &ArrayConfig, kx: f64, n: u32) -> Option<f64> {
    let upper = 2.0 * PI + kx;
    let q_max = (8.0 * PI * kx).sqrt();
    let f = |q: f64| {
        let k = (upper * upper - q * q).sqrt();
        if !(k > 2.0 * PI - kx) {
            return f64::NAN;
        }
        let pt = BlochPoint::new(k, kx);
        psi_n_c2(cfg, &pt, n).unwrap_or(f64::NAN)
    };
    let grid = threshold_refined_grid(1e-8, q_max * (1.0 - 1e-9), 48, 96);
    let (lo, hi) = first_bracket(f, &grid)?;
    let q_root = bisect_root(f, lo, hi);
    Some((upper * upper - q_root * q_root).sqrt())
}

/// kₙ(kₓ) as a public lookup (errors when the family is absent there).
pub fn k_n_c2(cfg: &ArrayConfig, kx: f64, n: u32) -> Result<f64> {
    require_half_or_zero(cfg.shift)?;
    continuum2_root(cfg, kx, n).ok_or(Error::NoRoot(
        "psi_n (continuum II) has no root at this kx",
    ))
}

/// φₙ(kₓ) = nπ√((kₙ²−kₓ²)/(kₙ²−(2π−kₓ)²)); NaN where kₙ does not exist.
pub fn phi_n_c2(cfg: &ArrayConfig, kx: f64, n: u32) -> f64 {
    match continuum2_root(cfg, kx, n) {
        Some(k) => {
            let low = 2.0 * PI - kx;
            n as f64 * PI * ((k * k - kx * kx) / (k * k - low * low)).sqrt()
        }
        None => f64::NAN,
    }
}

/// Root k∞(kₓ) of Ψ∞.
pub fn k_infinity(cfg: &ArrayConfig, kx: f64) -> Result<f64> {
    let upper = 2.0 * PI + kx;
    let q_max = (8.0 * PI * kx).sqrt();
    let f = |q: f64| {
        let k = (upper * upper - q * q).sqrt();
        if !(k > 2.0 * PI - kx) {
            return f64::NAN;
        }
        psi_infinity(cfg, &BlochPoint::new(k, kx)).unwrap_or(f64::NAN)
    };
    let grid = threshold_refined_grid(1e-8, q_max * (1.0 - 1e-9), 48, 96);
    let (lo, hi) = first_bracket(f, &grid).ok_or(Error::NoRoot("psi_infinity has no root"))?;
    let q_root = bisect_root(f, lo, hi);
    Ok((upper * upper - q_root * q_root).sqrt())
}

/// φ∞(kₓ) = √((k∞²−kₓ²)/(k∞²−(2π−kₓ)²)), strictly decreasing on (0, π).
pub fn phi_infinity(cfg: &ArrayConfig, kx: f64) -> Result<f64> {
    let k = k_infinity(cfg, kx)?;
    let low = 2.0 * PI - kx;
    Ok(((k * k - kx * kx) / (k * k - low * low)).sqrt())
}

/// Parity pairing of (n, l) demanded by the cos(2h k_z) = ±1 patterns:
/// a = 0 pairs equal parities, a = ½ opposite ones.
fn parity_allowed(a: f64, n: u32, l: u32) -> bool {
    if a == 0.0 {
        (n + l) % 2 == 0
    } else {
        (n + l) % 2 == 1
    }
}

/// Residuals (r₁, r₂) of the full two-open-channel system at (cfg, pt):
/// r₁ for the modulus equation, r₂ for the phase equation.
pub fn two_channel_system_residuals(cfg: &ArrayConfig, pt: &BlochPoint) -> Result<(f64, f64)> {
    let k = pt.k();
    let kx = pt.kx().abs();
    let kz = (k * k - kx * kx).sqrt();
    let low = 2.0 * PI - kx;
    let kzn = (k * k - low * low).sqrt();
    let h = cfg.half_gap;
    let ca = (2.0 * PI * cfg.shift).cos();
    let star = phi_star(pt, cfg)?;
    let (c, _s, _) = phi_cs(pt, cfg.shift, h, DEFAULT_TOL)?;
    let psi_p = star - c;
    let psi_m = star + c;
    let c0 = (2.0 * h * kz).cos();
    let c1 = (2.0 * h * kzn).cos();
    let r1 = (2.0 * (1.0 - ca * c0 * c1) / (kz * kzn) - psi_p * psi_m).abs();
    let r2 = (psi_p * ((1.0 - c0) / kz + (1.0 - ca * c1) / kzn)
        + psi_m * ((1.0 + c0) / kz + (1.0 + ca * c1) / kzn))
        .abs();
    Ok((r1, r2))
}

fn record_at(cfg: &ArrayConfig, kx: f64, n: u32, l: u32) -> Option<BoundStateRecord> {
    let k = continuum2_root(cfg, kx, n)?;
    let low = 2.0 * PI - kx;
    let kzn = (k * k - low * low).sqrt();
    let h = n as f64 * PI / (2.0 * kzn);
    let at = cfg.with_half_gap(h);
    let pt = BlochPoint::new(k, kx);
    let residual = determinant(&pt, &at, DEFAULT_TOL).map(|d| d.norm()).ok()?;
    // on-cylinder phase relation: E(a+h e_z) = (−1)^{n+2a+1} e^{iakₓ} E(−h e_z)
    let sym_sign = if cfg.shift == 0.0 {
        if n % 2 == 1 { 1.0 } else { -1.0 }
    } else if n % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let approx_k = if n % 2 == 1 {
        let upper = 2.0 * PI + kx;
        let d = delta0(upper, cfg);
        Some(upper - 8.0 * PI * PI * d * d / upper)
    } else {
        None
    };
    Some(BoundStateRecord {
        region: RegionTag::ContinuumN(2),
        indices: Some((n, Some(l))),
        kx,
        k,
        h,
        a: cfg.shift,
        residual_delta: residual,
        symmetry: if sym_sign > 0.0 {
            Symmetry::Symmetric
        } else {
            Symmetry::SkewSymmetric
        },
        approx_k,
        family: Some(if sym_sign > 0.0 {
            super::psi::PsiFamily::Plus
        } else {
            super::psi::PsiFamily::Minus
        }),
    })
}

/// All continuum-II bound states with n ≤ n_max, l ≤ l_max for this shift.
/// For each n the kₓ quantization φₙ(kₓ) = lπ is solved on a refined grid;
/// only parity-consistent (n, l) are genuine bound states of this shift.
/// At a = 0 the zone edge kₓ = π carries the l = n member of every family
/// whose Ψₙ root exists there.
pub fn find_continuum_c2(
    cfg: &ArrayConfig,
    n_max: u32,
    l_max: u32,
) -> Result<Vec<BoundStateRecord>> {
    cfg.validate()?;
    require_half_or_zero(cfg.shift)?;
    let mut any_gate = false;
    let mut out = Vec::new();
    let grid_n = 256usize;
    let kx_lo = 1e-3;
    for n in 1..=n_max {
        // sample φₙ over the zone; NaN marks gate failure / missing root
        let mut samples: Vec<(f64, f64)> = Vec::with_capacity(grid_n + 1);
        for i in 0..=grid_n {
            let kx = kx_lo + (PI - 2e-9 - kx_lo) * i as f64 / grid_n as f64;
            if !existence_gate_c2(kx, cfg).holds {
                samples.push((kx, f64::NAN));
                continue;
            }
            any_gate = true;
            samples.push((kx, phi_n_c2(cfg, kx, n)));
        }
        for l in (n + 1)..=l_max {
            if !parity_allowed(cfg.shift, n, l) {
                continue;
            }
            let target = l as f64 * PI;
            for w in samples.windows(2) {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                if !y0.is_finite() || !y1.is_finite() {
                    continue;
                }
                if (y0 - target) * (y1 - target) <= 0.0 && y0 != target {
                    let kx_root =
                        bisect_root(|kx| phi_n_c2(cfg, kx, n) - target, x0, x1);
                    if let Some(rec) = record_at(cfg, kx_root, n, l) {
                        out.push(rec);
                    }
                    break;
                }
            }
        }
        // the kₓ = π member (infinite multiplicity point), a = 0 only
        if cfg.shift == 0.0 && l_max >= n {
            if let Some(rec) = record_at(cfg, PI, n, n) {
                out.push(rec);
            }
        }
    }
    if !any_gate && out.is_empty() {
        let g = existence_gate_c2(PI / 2.0, cfg);
        return Err(Error::GateFailed {
            lhs: g.lhs,
            rhs: g.rhs,
        });
    }
    out.sort_by(|a, b| {
        a.indices
            .partial_cmp(&b.indices)
            .unwrap()
            .then(a.kx.partial_cmp(&b.kx).unwrap())
    });
    Ok(out)
}

/// All quantization points k_x^{n,l} ∈ (α, β) of the (odd) family n,
/// regardless of parity: each is a bound state at the shift (0 or ½) whose
/// systems the l-parity matches. Returns (l, kₓ) pairs.
pub fn enumerate_kx_c2(
    n: u32,
    alpha: f64,
    beta: f64,
    cfg: &ArrayConfig,
) -> Result<Vec<(u32, f64)>> {
    assert!(n % 2 == 1, "enumerate_kx_c2 indexes the odd family");
    assert!(0.0 < alpha && alpha < beta && beta < PI);
    let phi_a = phi_n_c2(cfg, alpha, n);
    let phi_b = phi_n_c2(cfg, beta, n);
    if !phi_a.is_finite() || !phi_b.is_finite() {
        return Err(Error::NoRoot("family absent on part of (alpha, beta)"));
    }
    // φₙ is decreasing: crossings lπ for l in (φ(β)/π, φ(α)/π)
    let l_lo = (phi_b / PI).ceil() as u32;
    let l_hi = (phi_a / PI).floor() as u32;
    let mut out = Vec::new();
    for l in l_lo..=l_hi {
        let target = l as f64 * PI;
        let kx = bisect_root(|kx| phi_n_c2(cfg, kx, n) - target, alpha, beta);
        out.push((l, kx));
    }
    Ok(out)
}

//! Bound states in continuum I (one open channel): kₓ ∈ [0, π),
//! k ∈ (kₓ, 2π−kₓ), families Ψₙ(k) = 0 with h = nπ/(2k_z).
//!
//! Necessary condition on the parameters: (a, kₓ) ∈ L, i.e. kₓ = 0 with any
//! shift, or a ∈ {0, ½} with any kₓ (otherwise Φs ≠ 0 and the determinant
//! cannot vanish). The existence gate is the positivity of the k → kₓ⁺ limit
//! of Ψₙ; it is evaluated as the full rearranged series (authoritative) and
//! as the closed-form radius bound R√(ε_c−1) < C·(π−kₓ)^{1/4}/kₓ² (precheck).

use super::psi::{channel_sign, psi_n_core, psi_n_core_dk};
use super::search::{bisect_root, first_bracket, threshold_refined_grid};
use super::{BoundStateRecord, ExistenceGate, GateKind, Symmetry};
use crate::channels::{reduce_kx, BlochPoint, RegionTag};
use crate::error::{Error, Result};
use crate::lattice_sums::{delta0, determinant, ArrayConfig};
use crate::special::hurwitz_zeta_tail;
use crate::DEFAULT_TOL;
use std::f64::consts::PI;

/// Ψₙ of continuum I at (k, kₓ) ∈ the one-open-channel strip.
pub fn psi_n_c1(cfg: &ArrayConfig, pt: &BlochPoint, n: u32) -> Result<f64> {
    psi_n_core(cfg, pt, n, false)
}

/// Analytic ∂Ψₙ/∂k (continuum I); strictly negative on the domain.
pub fn psi_n_c1_dk(cfg: &ArrayConfig, pt: &BlochPoint, n: u32) -> Result<f64> {
    psi_n_core_dk(cfg, pt, n, false)
}

/// Golden-section minimizer on [lo, hi] (unimodal assumed; endpoints also
/// compared).
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    let mut best = (xm, fm);
    for (x, y) in [(lo, f(lo)), (hi, f(hi))] {
        if y < best.1 {
            best = (x, y);
        }
    }
    best
}

/// The closed-form gate constant C ≈ 5.846 recomputed by 1-D minimization.
pub fn gate_constant_c1() -> f64 {
    let f = |t: f64| {
        let sp = (1.0 + t).sqrt();
        let sm = (1.0 - t).sqrt();
        (1.0 + sp + sm) / (sp * (1.0 + (1.0 - t * t).sqrt()) * (2.0 + sp + sm))
    };
    let (_, fmin) = golden_min(f, 0.0, 1.0);
    PI.powf(0.75) * 2.0f64.sqrt() / fmin.sqrt()
}

/// Positivity condition of the k → kₓ⁺ limit (the rearranged all-nonnegative
/// series), plus the closed-form radius precheck.
pub fn existence_gate_c1(kx: f64, cfg: &ArrayConfig) -> ExistenceGate {
    let kx = reduce_kx(kx).abs();
    let c1 = gate_constant_c1();
    let rs = cfg.radius * (cfg.eps_c - 1.0).sqrt();
    let precheck = if kx > 0.0 {
        rs < c1 * (PI - kx).max(0.0).powf(0.25) / (kx * kx)
    } else {
        true
    };
    if kx == 0.0 {
        // all series summands vanish; the limit is +∞
        return ExistenceGate {
            holds: true,
            lhs: f64::INFINITY,
            rhs: (0.5 - (2.0 * PI * cfg.radius).ln()) / PI,
            kind: GateKind::ContinuumI,
            precheck,
        };
    }
    let lhs = 2.0 / (PI * cfg.radius * cfg.radius * (cfg.eps_c - 1.0) * kx * kx);
    let m_cut = 20_000;
    let mut series = 0.0;
    for m in 1..=m_cut {
        let mf = m as f64;
        series += 1.0 / (4.0 * PI * PI * mf * mf - 4.0 * PI * mf * kx).sqrt()
            + 1.0 / (4.0 * PI * PI * mf * mf + 4.0 * PI * mf * kx).sqrt()
            - 1.0 / (PI * mf);
    }
    // tail of (1/(2πm))[(1−t)^{-1/2} + (1+t)^{-1/2} − 2], t = kx/(πm)
    let a = m_cut as f64 + 1.0;
    series += 3.0 * kx * kx / (8.0 * PI * PI * PI) * hurwitz_zeta_tail(3, a)
        + 0.546875 * kx.powi(4) / (2.0 * PI.powi(5)) * hurwitz_zeta_tail(5, a);
    let rhs = series + (0.5 - (2.0 * PI * cfg.radius).ln()) / PI;
    ExistenceGate {
        holds: lhs > rhs,
        lhs,
        rhs,
        kind: GateKind::ContinuumI,
        precheck,
    }
}

fn in_set_l(a: f64, kx: f64) -> bool {
    (kx.abs() < 1e-14 && (0.0..=0.5).contains(&a)) || ((a == 0.0 || a == 0.5) && kx.abs() < PI)
}

/// Root of Ψₙ in the decay rate q = q_{z,−1} ∈ (0, √((2π−kₓ)² − kₓ²)).
fn continuum1_root(cfg: &ArrayConfig, kx: f64, n: u32) -> Result<f64> {
    let upper = 2.0 * PI - kx;
    let q_max = (upper * upper - kx * kx).sqrt();
    let f = |q: f64| {
        let k = (upper * upper - q * q).sqrt();
        if !(k > kx) {
            return f64::NAN;
        }
        let pt = BlochPoint::new(k, kx);
        psi_n_c1(cfg, &pt, n).unwrap_or(f64::NAN)
    };
    let grid = threshold_refined_grid(1e-8, q_max * (1.0 - 1e-9), 48, 96);
    let (lo, hi) = first_bracket(f, &grid).ok_or(Error::NoRoot(
        "psi_n has no sign change on (kx, 2pi-kx); family absent for these parameters",
    ))?;
    let q_root = bisect_root(f, lo, hi);
    Ok((upper * upper - q_root * q_root).sqrt())
}

fn symmetry_from_parity(a: f64, n: u32) -> Symmetry {
    if a == 0.0 || a == 0.5 {
        if n % 2 == 1 {
            Symmetry::Symmetric
        } else {
            Symmetry::SkewSymmetric
        }
    } else {
        Symmetry::Unclassified
    }
}

/// Leading-order wavenumber from the single-channel balance
/// 1/(2πδ₀) = (1 − (−1)ⁿ cos 2πa)/q_{z,−1}; None when the factor vanishes.
fn approx_k_c1(cfg: &ArrayConfig, kx: f64, n: u32) -> Option<f64> {
    // channel_sign(m=−1) = (−1)ⁿ cos(2πa), the dominant evanescent channel
    let g = 1.0 - channel_sign(false, n, cfg.shift, -1);
    let upper = 2.0 * PI - kx;
    let d = delta0(upper, cfg);
    if g.abs() < 1e-12 {
        return None;
    }
    let q_star = 2.0 * PI * d * g;
    Some((upper * upper - q_star * q_star).sqrt())
}

/// All continuum-I bound states with n ≤ n_max at this (cfg.shift, kₓ).
/// Records carry h_n = nπ/(2k_z), the |Δ| residual, the symmetry class, and
/// the perturbative wavenumber where one exists.
pub fn find_continuum_c1(cfg: &ArrayConfig, kx: f64, n_max: u32) -> Result<Vec<BoundStateRecord>> {
    cfg.validate()?;
    let kx = reduce_kx(kx).abs();
    if !in_set_l(cfg.shift, kx) {
        return Err(Error::InvalidConfig(format!(
            "(a={}, kx={kx}) is outside the set L: need kx=0 or a in {{0, 1/2}}",
            cfg.shift
        )));
    }
    let gate = existence_gate_c1(kx, cfg);
    if !gate.holds {
        return Err(Error::GateFailed {
            lhs: gate.lhs,
            rhs: gate.rhs,
        });
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        let k = match continuum1_root(cfg, kx, n) {
            Ok(k) => k,
            Err(Error::NoRoot(_)) => continue,
            Err(e) => return Err(e),
        };
        let kz = (k * k - kx * kx).sqrt();
        let h = n as f64 * PI / (2.0 * kz);
        let at = cfg.with_half_gap(h);
        let pt = BlochPoint::new(k, kx);
        let residual = determinant(&pt, &at, DEFAULT_TOL)
            .map(|d| d.norm())
            .unwrap_or(f64::NAN);
        out.push(BoundStateRecord {
            region: RegionTag::ContinuumN(1),
            indices: Some((n, None)),
            kx,
            k,
            h,
            a: cfg.shift,
            residual_delta: residual,
            symmetry: symmetry_from_parity(cfg.shift, n),
            approx_k: approx_k_c1(cfg, kx, n),
            family: Some(if n % 2 == 1 {
                super::psi::PsiFamily::Plus
            } else {
                super::psi::PsiFamily::Minus
            }),
        });
    }
    Ok(out)
}

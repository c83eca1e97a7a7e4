//! Bound states below the radiation continuum: all channels closed,
//! kₓ ∈ (0, π], 0 < k < |kₓ|, roots of Ψ± = Φ* ∓ √(Φc² + Φs²).
//!
//! Ψ⁺ runs from +∞ (k → 0, the 1/δ₀(k) term) to −∞ (k → kₓ, the −2/q_{z,0}
//! divergence), so the k⁺ root always exists. Ψ⁻ stays finite at the upper
//! endpoint; its root exists only when the structure is strong enough or the
//! arrays far enough apart, and is searched for by a sign-change scan.

use super::psi::PsiFamily;
use super::search::{bisect_root, first_bracket, threshold_refined_grid};
use super::{BoundStateRecord, Symmetry};
use crate::channels::{classify, BlochPoint, RegionTag};
use crate::error::{Error, Result};
use crate::lattice_sums::{delta0, determinant, phi_cs, phi_star, ArrayConfig};
use crate::DEFAULT_TOL;
use std::f64::consts::PI;

/// The pair (Ψ⁺, Ψ⁻) below the continuum.
pub fn psi_pm_below(cfg: &ArrayConfig, pt: &BlochPoint) -> Result<(f64, f64)> {
    if classify(pt) != RegionTag::BelowContinuum {
        return Err(Error::InvalidConfig(format!(
            "(k={}, kx={}) is not below the continuum",
            pt.k(),
            pt.kx()
        )));
    }
    let star = phi_star(pt, cfg)?;
    let (c, s, _) = phi_cs(pt, cfg.shift, cfg.half_gap, DEFAULT_TOL)?;
    let root = (c * c + s * s).sqrt();
    Ok((star - root, star + root))
}

fn psi_below_at_q(cfg: &ArrayConfig, kx: f64, q0: f64, family: PsiFamily) -> f64 {
    // q0 = q_{z,0} = sqrt(kx² − k²)
    let k = (kx * kx - q0 * q0).sqrt();
    if !(k > 0.0) {
        return f64::NAN;
    }
    let pt = BlochPoint::new(k, kx);
    match psi_pm_below(cfg, &pt) {
        Ok((p, m)) => match family {
            PsiFamily::Plus => p,
            PsiFamily::Minus => m,
        },
        Err(_) => f64::NAN,
    }
}

/// Symmetry class of a below-continuum state from the on-cylinder phase
/// relation E(a+h e_z) = ±e^{i(φ+akₓ)}E(−h e_z): at a ∈ {0, ½} the sum behind
/// φ is real, so the total sign is (family sign)·sign(Σ e^{−2hq+2πiam}/q).
fn below_symmetry(cfg: &ArrayConfig, pt: &BlochPoint, family: PsiFamily) -> Symmetry {
    if cfg.shift != 0.0 && cfg.shift != 0.5 {
        return Symmetry::Unclassified;
    }
    let (c, _s, _) = phi_cs(pt, cfg.shift, cfg.half_gap, DEFAULT_TOL).unwrap_or((1.0, 0.0, 0.0));
    let total = family.sign() * c.signum();
    if total > 0.0 {
        Symmetry::Symmetric
    } else {
        Symmetry::SkewSymmetric
    }
}

fn below_record(cfg: &ArrayConfig, kx: f64, q_root: f64, family: PsiFamily) -> BoundStateRecord {
    let k = (kx * kx - q_root * q_root).sqrt();
    let pt = BlochPoint::new(k, kx);
    let residual = determinant(&pt, cfg, DEFAULT_TOL)
        .map(|d| d.norm())
        .unwrap_or(f64::NAN);
    let approx_k = match family {
        // leading order in δ₀(kₓ): k⁺ ≈ kₓ − 8π²δ₀²(kₓ)/kₓ
        PsiFamily::Plus => {
            let d = delta0(kx, cfg);
            Some(kx - 8.0 * PI * PI * d * d / kx)
        }
        // no simple analytic approximation exists for k⁻
        PsiFamily::Minus => None,
    };
    BoundStateRecord {
        region: RegionTag::BelowContinuum,
        indices: None,
        kx,
        k,
        h: cfg.half_gap,
        a: cfg.shift,
        residual_delta: residual,
        symmetry: below_symmetry(cfg, &pt, family),
        approx_k,
        family: Some(family),
    }
}

fn find_family(cfg: &ArrayConfig, kx: f64, family: PsiFamily) -> Result<BoundStateRecord> {
    let akx = crate::channels::reduce_kx(kx).abs();
    if akx <= 0.0 {
        return Err(Error::InvalidConfig(
            "below-continuum search needs kx in (0, π]".into(),
        ));
    }
    // Bracket in q0 ∈ (0, kx): q0 → 0 is the k → kx threshold side.
    let grid = threshold_refined_grid(1e-8 * akx.min(1.0), akx * (1.0 - 1e-12), 48, 96);
    let f = |q: f64| psi_below_at_q(cfg, akx, q, family);
    let (lo, hi) = first_bracket(f, &grid).ok_or(Error::NoBracket {
        function: match family {
            PsiFamily::Plus => "psi_plus_below",
            PsiFamily::Minus => "psi_minus_below",
        },
        lo: 0.0,
        hi: akx,
    })?;
    let q_root = bisect_root(f, lo, hi);
    Ok(below_record(cfg, akx, q_root, family))
}

/// All below-continuum bound states at this (cfg, kₓ): the k⁺ root (always
/// present) and the k⁻ root when Ψ⁻ changes sign on (0, kₓ).
pub fn find_below(cfg: &ArrayConfig, kx: f64) -> Result<Vec<BoundStateRecord>> {
    cfg.validate()?;
    let mut out = vec![find_family(cfg, kx, PsiFamily::Plus)?];
    if let Ok(rec) = find_family(cfg, kx, PsiFamily::Minus) {
        out.push(rec);
    }
    Ok(out)
}

/// The k⁻ root alone; NoBracket when Ψ⁻ has no sign change on (0, kₓ).
pub fn find_below_minus(cfg: &ArrayConfig, kx: f64) -> Result<BoundStateRecord> {
    cfg.validate()?;
    find_family(cfg, kx, PsiFamily::Minus)
}

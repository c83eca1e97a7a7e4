//! The dispersion functions Ψ and their analytic derivatives.
//!
//! Continuum I, free h (one open channel m = 0):
//!
//! ```text
//! Ψ±(a,h,k,kₓ) = Φ* ± (sin(2h k_z)/k_z − Φc)
//! ```
//!
//! Pinned forms with h = nπ/(2·k_ref):
//!
//! ```text
//! Ψₙ = 1/(2πδ₀) + Σ_{m∉E} (1/(2π(|m|+1)) − (1 − σ_m e^{−nπ q_m/k_ref})/q_m)
//!      + (c_E + ln 2πR)/π
//! ```
//!
//! with (E, k_ref, c_E) = ({0}, k_{z,0}, 1/2) in continuum I and
//! ({0,−1}, k_{z,−1}, 3/4) in continuum II, and channel signs
//! σ_m = (−1)ⁿ cos(2πam) resp. (−1)^{n+2a(m+1)}.

use crate::channels::{open_channels, BlochPoint};
use crate::error::{Error, Result};
use crate::lattice_sums::{
    delta0, guard_thresholds, inv_q_cubed_sum, phi_cs, phi_star, regulated_closed_sum, ArrayConfig,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which branch of the Ψ pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PsiFamily {
    Plus,
    Minus,
}

impl PsiFamily {
    pub fn sign(&self) -> f64 {
        match self {
            PsiFamily::Plus => 1.0,
            PsiFamily::Minus => -1.0,
        }
    }
}

fn q_at(pt: &BlochPoint, m: i64) -> f64 {
    let kappa = pt.kappa(m);
    (kappa * kappa - pt.k() * pt.k()).sqrt()
}

/// Continuum-I Ψ± at free h (the one-open-channel determinant split).
/// Requires exactly the m = 0 channel open.
pub fn psi_pm_c1(cfg: &ArrayConfig, pt: &BlochPoint, family: PsiFamily) -> Result<f64> {
    let open = open_channels(pt);
    if open != [0] {
        return Err(Error::InvalidConfig(format!(
            "psi_pm_c1 needs exactly channel 0 open, got {open:?} at (k={}, kx={})",
            pt.k(),
            pt.kx()
        )));
    }
    let star = phi_star(pt, cfg)?;
    let (c, _s, _e) = phi_cs(pt, cfg.shift, cfg.half_gap, crate::DEFAULT_TOL)?;
    let kz = (pt.k() * pt.k() - pt.kx() * pt.kx()).sqrt();
    Ok(star + family.sign() * ((2.0 * cfg.half_gap * kz).sin() / kz - c))
}

/// ∂Ψ±/∂k at free h (continuum I).
pub fn dpsi_pm_c1_dk(cfg: &ArrayConfig, pt: &BlochPoint, family: PsiFamily) -> Result<f64> {
    guard_thresholds(pt)?;
    let k = pt.k();
    let open = open_channels(pt);
    let h = cfg.half_gap;
    // dΦ*/dk = −4/(πR²k³(ε_c−1)) − k Σ_closed 1/q³
    let (q3, _) = inv_q_cubed_sum(pt, &open);
    let dstar = -4.0 / (PI * cfg.radius * cfg.radius * k.powi(3) * (cfg.eps_c - 1.0)) - k * q3;
    // d(sin(2hk_z)/k_z)/dk = k (2h cos(2hk_z) − sin(2hk_z)/k_z) / k_z²
    let kz = (k * k - pt.kx() * pt.kx()).sqrt();
    let dsin = k * (2.0 * h * (2.0 * h * kz).cos() - (2.0 * h * kz).sin() / kz) / (kz * kz);
    // dΦc/dk = k Σ_closed cos(2πam) e^{−2hq} (1 + 2hq)/q³
    let mut dc = 0.0;
    let mut m_abs = 0i64;
    loop {
        let both = [m_abs, -m_abs];
        let ms = if m_abs == 0 { &both[..1] } else { &both[..] };
        let mut bound = 0.0f64;
        for &m in ms {
            if open.contains(&m) {
                continue;
            }
            let q = q_at(pt, m);
            let w = (-2.0 * h * q).exp() * (1.0 + 2.0 * h * q) / (q * q * q);
            dc += (2.0 * PI * cfg.shift * m as f64).cos() * w;
            bound = bound.max(w);
        }
        if m_abs > 1 && bound < 1e-16 {
            break;
        }
        m_abs += 1;
        if m_abs > 100_000 {
            break;
        }
    }
    dc *= k;
    Ok(dstar + family.sign() * (dsin - dc))
}

/// ∂Ψ±/∂h at free h (continuum I).
pub fn dpsi_pm_c1_dh(cfg: &ArrayConfig, pt: &BlochPoint, family: PsiFamily) -> Result<f64> {
    guard_thresholds(pt)?;
    let open = open_channels(pt);
    let kz = (pt.k() * pt.k() - pt.kx() * pt.kx()).sqrt();
    let mut dc = 0.0;
    let mut m_abs = 0i64;
    loop {
        let both = [m_abs, -m_abs];
        let ms = if m_abs == 0 { &both[..1] } else { &both[..] };
        let mut bound = 0.0f64;
        for &m in ms {
            if open.contains(&m) {
                continue;
            }
            let q = q_at(pt, m);
            let w = -2.0 * (-2.0 * cfg.half_gap * q).exp();
            dc += (2.0 * PI * cfg.shift * m as f64).cos() * w;
            bound = bound.max(w.abs());
        }
        if m_abs > 1 && bound < 1e-16 {
            break;
        }
        m_abs += 1;
        if m_abs > 100_000 {
            break;
        }
    }
    Ok(family.sign() * (2.0 * (2.0 * cfg.half_gap * kz).cos() - dc))
}

/// Channel sign σ_m for the pinned-Ψ series.
pub(crate) fn channel_sign(region2: bool, n: u32, a: f64, m: i64) -> f64 {
    let n_parity = if n % 2 == 0 { 1.0 } else { -1.0 };
    if !region2 {
        // (−1)ⁿ cos(2πam); a is arbitrary in the set L here.
        n_parity * (2.0 * PI * a * m as f64).cos()
    } else if a == 0.0 {
        n_parity
    } else {
        // a = 1/2: (−1)^{n + m + 1}
        let mp = if (m.rem_euclid(2)) == 0 { 1.0 } else { -1.0 };
        -n_parity * mp
    }
}

/// Shared pinned-Ψ series. `region2` selects the continuum-II variant.
pub(crate) fn psi_n_core(
    cfg: &ArrayConfig,
    pt: &BlochPoint,
    n: u32,
    region2: bool,
) -> Result<f64> {
    guard_thresholds(pt)?;
    let excluded: &[i64] = if region2 { &[0, -1] } else { &[0] };
    let const_term = if region2 { 0.75 } else { 0.5 };
    let k = pt.k();
    let ref_channel = if region2 { -1 } else { 0 };
    let kappa_ref = pt.kappa(ref_channel);
    let kz_ref = (k * k - kappa_ref * kappa_ref).sqrt();
    assert!(kz_ref.is_finite() && kz_ref > 0.0, "reference channel closed");

    let (reg, _) = regulated_closed_sum(pt, excluded);
    let mut expo = 0.0;
    let rate = n as f64 * PI / kz_ref;
    let mut m_abs = 1i64;
    loop {
        let mut bound = 0.0f64;
        for m in [m_abs, -m_abs] {
            if excluded.contains(&m) {
                continue;
            }
            let q = q_at(pt, m);
            let w = (-rate * q).exp() / q;
            expo += channel_sign(region2, n, cfg.shift, m) * w;
            bound = bound.max(w);
        }
        if m_abs > 2 && bound < 1e-17 {
            break;
        }
        m_abs += 1;
        if m_abs > 100_000 {
            break;
        }
    }
    Ok(1.0 / (2.0 * PI * delta0(k, cfg))
        + reg
        + expo
        + (const_term + (2.0 * PI * cfg.radius).ln()) / PI)
}

/// ∂Ψₙ/∂k of the pinned series (the closed form used against finite
/// differences). Strictly negative on the domain.
pub(crate) fn psi_n_core_dk(
    cfg: &ArrayConfig,
    pt: &BlochPoint,
    n: u32,
    region2: bool,
) -> Result<f64> {
    guard_thresholds(pt)?;
    let excluded: &[i64] = if region2 { &[0, -1] } else { &[0] };
    let k = pt.k();
    let ref_channel = if region2 { -1 } else { 0 };
    let kappa_ref = pt.kappa(ref_channel);
    let kz_ref = (k * k - kappa_ref * kappa_ref).sqrt();
    let npi = n as f64 * PI;

    let (q3, _) = inv_q_cubed_sum(pt, excluded);
    let mut expo = 0.0;
    let mut m_abs = 1i64;
    loop {
        let mut bound = 0.0f64;
        for m in [m_abs, -m_abs] {
            if excluded.contains(&m) {
                continue;
            }
            let q = q_at(pt, m);
            let t = npi * q / kz_ref;
            let w = (-t).exp()
                * (1.0 + npi * (q / kz_ref + q * q * q / (kz_ref * kz_ref * kz_ref)))
                / (q * q * q);
            expo += channel_sign(region2, n, cfg.shift, m) * w;
            bound = bound.max(w.abs());
        }
        if m_abs > 2 && bound < 1e-17 {
            break;
        }
        m_abs += 1;
        if m_abs > 100_000 {
            break;
        }
    }
    Ok(-4.0 / (PI * cfg.radius * cfg.radius * k.powi(3) * (cfg.eps_c - 1.0))
        - k * (q3 - expo))
}

//! Bound-state candidates with three or more open channels.
//!
//! With N ≥ 3 open channels every open channel must carry a standing wave:
//! 2h·k_{z,m} = nₘπ. For channels (0, −1, +1) ← (n₀, n₁, n₂) this forces
//!
//! ```text
//! kₓ = (n₁²−n₂²)π/D,  h = √D/(4√2),  k = π√((4n₀²−n₁²−n₂²)² − 4n₁²n₂²)/D,
//! D = 2n₀² − n₁² − n₂²,
//! ```
//!
//! and a fourth open channel adds the diophantine constraint
//! 3n₁² + n₂² = 3n₀² + n₃². On top of the quantizations, the no-flux system
//! fixes the relative on-cylinder phase per channel, which is consistent
//! only when the parity pattern of the nₘ matches the shift: at a = 0 all nₘ
//! share one parity; at a = ½ the odd-|m| channels flip. When the pattern is
//! consistent, Δ = 0 pins the material combination
//! X = 2/(k²R²(ε_c−1)) + ln(2πR) to an exact curve constant C; otherwise Δ
//! stays bounded away from zero for every physical (R, ε_c) and no bound
//! state exists on the tuple.

use crate::channels::{classify, open_channels, BlochPoint};
use crate::error::{Error, Result};
use crate::lattice_sums::{phi_cs, phi_pm, regulated_closed_sum, ArrayConfig, PmSign};
use crate::DEFAULT_TOL;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One diophantine tuple with its derived spectral point and curve data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiophantineRecord {
    /// (n₀, n₁, n₂) or (n₀, n₁, n₂, n₃).
    pub tuple: Vec<u32>,
    pub kx: f64,
    pub h: f64,
    pub k: f64,
    /// Open channels found by enumeration at (k, kₓ).
    pub open_count: u32,
    /// Whether the per-channel phase pattern admits a bound state at some
    /// shift a ∈ {0, ½}.
    pub consistent: bool,
    /// The realizing shift when consistent; otherwise the shift minimizing
    /// the determinant residual.
    pub shift: Option<f64>,
    /// Curve constant C = 2/(k²R²(ε_c−1)) + ln(2πR) solving Δ = 0
    /// (only when consistent).
    pub c_curve: Option<f64>,
    /// |Δ| at the emitted X: ≈ 0 when consistent, the unremovable minimum
    /// otherwise.
    pub delta_residual: f64,
}

/// The spectral point of a (possibly 4-index) tuple.
/// Fails with DegenerateTriple when 2n₀² = n₁² + n₂².
pub fn diophantine_point(n0: u32, n1: u32, n2: u32) -> Result<(f64, f64, f64)> {
    let (a0, a1, a2) = (n0 as f64, n1 as f64, n2 as f64);
    let d = 2.0 * a0 * a0 - a1 * a1 - a2 * a2;
    if d == 0.0 {
        return Err(Error::DegenerateTriple { n0, n1, n2 });
    }
    if !(n0 > n1 && n1 >= n2 && n2 >= 1) || d < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "tuple ({n0},{n1},{n2}) violates n0 > n1 >= n2 >= 1"
        )));
    }
    let kx = (a1 * a1 - a2 * a2) * PI / d;
    let h = d.sqrt() / (4.0 * 2.0f64.sqrt());
    let radicand = (4.0 * a0 * a0 - a1 * a1 - a2 * a2).powi(2) - 4.0 * a1 * a1 * a2 * a2;
    let k = PI * radicand.sqrt() / d;
    Ok((kx, h, k))
}

/// Phase-pattern consistency: returns the realizing shift when the signs
/// ε_m·e^{2πiam} agree across all open channels.
fn consistent_shift(tuple: &[(i64, u32)]) -> Option<f64> {
    let eps = |n: u32| if n % 2 == 0 { 1i32 } else { -1 };
    for &a2 in &[0u32, 1] {
        // a2 = 2a ∈ {0, 1}
        let signs: Vec<i32> = tuple
            .iter()
            .map(|&(m, n)| {
                let phase = if a2 == 1 && m.rem_euclid(2) == 1 { -1 } else { 1 };
                eps(n) * phase
            })
            .collect();
        if signs.iter().all(|&s| s == signs[0]) {
            return Some(a2 as f64 / 2.0);
        }
    }
    None
}

fn channel_assignment(kx: f64, k: f64, tuple: &[u32]) -> Vec<(i64, u32)> {
    // channels in threshold order: 0, −1, +1, −2, ...
    let order = [0i64, -1, 1, -2, 2, -3, 3];
    let open = open_channels(&BlochPoint::new(k, kx));
    order
        .iter()
        .filter(|m| open.contains(m))
        .take(tuple.len())
        .zip(tuple.iter())
        .map(|(&m, &n)| (m, n))
        .collect()
}

/// Im Φ₀ with the material term X split off: Im Φ₀ = X/π + q0.
fn material_free_imag(pt: &BlochPoint) -> f64 {
    let open = open_channels(pt);
    let (reg, _) = regulated_closed_sum(pt, &open);
    let open_reg: f64 = open
        .iter()
        .map(|m| 1.0 / (2.0 * PI * (m.unsigned_abs() as f64 + 1.0)))
        .sum();
    open_reg + reg
}

fn delta_at(pt: &BlochPoint, a: f64, h: f64, x: f64) -> Complex64 {
    // Δ(X) = (P + i(q0 + X/π))² − Φ⁺Φ⁻ — Φ± carry no material dependence.
    let p: f64 = open_channels(pt)
        .iter()
        .map(|&m| {
            let kappa = pt.kappa(m);
            1.0 / (pt.k() * pt.k() - kappa * kappa).sqrt()
        })
        .sum();
    let q0 = material_free_imag(pt);
    // geometry carrier for phi_pm: radius/eps are unused by Φ±
    let cfg = ArrayConfig {
        radius: 0.1,
        eps_c: 1.5,
        shift: a,
        half_gap: h,
    };
    let prod = phi_pm(pt, &cfg, PmSign::Plus, DEFAULT_TOL).unwrap()
        * phi_pm(pt, &cfg, PmSign::Minus, DEFAULT_TOL).unwrap();
    let phi0 = Complex64::new(p, q0 + x / PI);
    phi0 * phi0 - prod
}

fn analyze_tuple(tuple: &[u32], kx: f64, h: f64, k: f64) -> DiophantineRecord {
    let pt = BlochPoint::new(k, kx);
    let open_count = classify(&pt).open_count();
    let assignment = channel_assignment(kx, k, tuple);
    let shift = consistent_shift(&assignment);
    match shift {
        Some(a) => {
            // exact solve: σ = ε₀, X = π(−σ·Φc(a) − q0)
            let sigma = if tuple[0] % 2 == 0 { 1.0 } else { -1.0 };
            let (phic, _, _) = phi_cs(&pt, a, h, DEFAULT_TOL).unwrap();
            let q0 = material_free_imag(&pt);
            let x = PI * (-sigma * phic - q0);
            let residual = delta_at(&pt, a, h, x).norm();
            DiophantineRecord {
                tuple: tuple.to_vec(),
                kx,
                h,
                k,
                open_count,
                consistent: true,
                shift: Some(a),
                c_curve: Some(x),
                delta_residual: residual,
            }
        }
        None => {
            // no exact solution exists; report the best residual over both
            // shifts for transparency
            let mut best = (f64::INFINITY, 0.0f64);
            for &a in &[0.0, 0.5] {
                let q0 = material_free_imag(&pt);
                for i in 0..400 {
                    let y = -40.0 + 80.0 * i as f64 / 399.0;
                    let x = PI * (y - q0);
                    let r = delta_at(&pt, a, h, x).norm();
                    if r < best.0 {
                        best = (r, a);
                    }
                }
            }
            DiophantineRecord {
                tuple: tuple.to_vec(),
                kx,
                h,
                k,
                open_count,
                consistent: false,
                shift: Some(best.1),
                c_curve: None,
                delta_residual: best.0,
            }
        }
    }
}

/// Enumerate all tuples up to `search_bound` whose spectral point opens
/// exactly `channel_count` channels (3 or 4), with phase-pattern analysis
/// and curve constants.
pub fn diophantine_n(channel_count: u32, search_bound: u32) -> Result<Vec<DiophantineRecord>> {
    if !(channel_count == 3 || channel_count == 4) {
        return Err(Error::InvalidConfig(format!(
            "channel_count must be 3 or 4, got {channel_count}"
        )));
    }
    if search_bound < 2 {
        return Err(Error::InvalidConfig("search_bound must be >= 2".into()));
    }
    let mut out = Vec::new();
    if channel_count == 3 {
        for n0 in 2..=search_bound {
            for n1 in 1..n0 {
                for n2 in 1..=n1 {
                    let Ok((kx, h, k)) = diophantine_point(n0, n1, n2) else {
                        continue;
                    };
                    let rec = analyze_tuple(&[n0, n1, n2], kx, h, k);
                    if rec.open_count == 3 {
                        out.push(rec);
                    }
                }
            }
        }
    } else {
        // n0 >= n1 > n2 >= n3 with 3n1² + n2² = 3n0² + n3²
        for n0 in 1..=search_bound {
            for n1 in 1..=n0 {
                for n2 in 1..n1 {
                    for n3 in 1..=n2 {
                        if 3 * n1 * n1 + n2 * n2 != 3 * n0 * n0 + n3 * n3 {
                            continue;
                        }
                        let (a0, a1, a2) = (n0 as f64, n1 as f64, n2 as f64);
                        let d = 2.0 * a0 * a0 - a1 * a1 - a2 * a2;
                        if d <= 0.0 {
                            continue;
                        }
                        let kx = (a1 * a1 - a2 * a2) * PI / d;
                        let h = d.sqrt() / (4.0 * 2.0f64.sqrt());
                        let radicand =
                            (4.0 * a0 * a0 - a1 * a1 - a2 * a2).powi(2) - 4.0 * a1 * a1 * a2 * a2;
                        let k = PI * radicand.sqrt() / d;
                        let rec = analyze_tuple(&[n0, n1, n2, n3], kx, h, k);
                        if rec.open_count == 4 {
                            out.push(rec);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

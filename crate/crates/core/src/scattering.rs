//! The driven (incident-wave) problem in the zero-radius approximation:
//! on-cylinder fields, channel amplitudes, specular reflection, resonance
//! positions and widths, and the near-field amplification close to a bound
//! state in the continuum.
//!
//! The incident wave is the unit-amplitude plane wave e^{ik·r} with
//! k_z > 0 (propagating toward +z); `FromAbove` is realized by the z → −z
//! symmetry map of the same kernel rather than a second code path. The
//! on-cylinder values solve the 2×2 system
//!
//! ```text
//! Φ₀·E₊ + Φ⁺·E₋ = (i/2πδ₀)·e^{i(a kₓ + h k_z)}
//! Φ⁻·E₊ + Φ₀·E₋ = (i/2πδ₀)·e^{−i h k_z}
//! ```
//!
//! whose determinant Δ vanishes exactly at the bound states, where the
//! driven solution stops being unique (`SingularSystem`).

use crate::bound_states::{dpsi_pm_c1_dh, dpsi_pm_c1_dk, psi_pm_c1, BoundStateRecord, PsiFamily};
use crate::bound_states::bisect_root;
use crate::channels::{channel_wavenumber, open_channels, BlochPoint};
use crate::error::{Error, Result};
use crate::lattice_sums::{delta0, ArrayConfig, LatticeSums};
use crate::DEFAULT_TOL;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Side the incident wave comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    FromBelow,
    FromAbove,
}

/// Relative determinant guard below which the driven system is declared
/// singular (a bound state), as opposed to mere conditioning loss.
pub const DET_GUARD: f64 = 1e-8;

/// Solution of the driven problem at one spectral point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringSolution {
    /// Field on the cylinder at (0, −h).
    pub e_left: Complex64,
    /// Field on the cylinder at (a, +h).
    pub e_right: Complex64,
    /// Outgoing amplitudes on the incidence side (reflection), by channel.
    pub refl: BTreeMap<i64, Complex64>,
    /// Outgoing amplitudes on the far side (transmission), by channel. The
    /// m = 0 entry excludes the incident wave itself.
    pub trans: BTreeMap<i64, Complex64>,
    /// |Σ_open (k_{z,m}/k_{z,0})(|Rₘ|² + |δ_{m0}+Tₘ|²) − 1|.
    pub flux_error: f64,
    pub k: f64,
    pub kx: f64,
    pub direction: Direction,
}

fn kernel_solve(
    cfg: &ArrayConfig,
    shift: f64,
    pt: &BlochPoint,
) -> Result<(Complex64, Complex64, BTreeMap<i64, Complex64>, BTreeMap<i64, Complex64>)> {
    let open = open_channels(pt);
    if open.is_empty() {
        return Err(Error::InvalidConfig(
            "scattering needs at least one open channel".into(),
        ));
    }
    let raw = ArrayConfig { shift, ..*cfg };
    let sums = LatticeSums::evaluate(pt, &raw, DEFAULT_TOL)?;
    let det = sums.determinant();
    let scale = sums.phi0.norm_sqr() + (sums.phi_plus * sums.phi_minus).norm();
    if det.norm() < DET_GUARD * scale {
        return Err(Error::SingularSystem {
            det_abs: det.norm(),
            guard: DET_GUARD,
        });
    }
    let k = pt.k();
    let kx = pt.kx();
    let h = cfg.half_gap;
    let kz0 = (k * k - kx * kx).sqrt();
    let c = Complex64::new(0.0, 1.0) / (2.0 * PI * sums.delta0);
    let rhs_top = c * Complex64::new(0.0, shift * kx + h * kz0).exp();
    let rhs_bot = c * Complex64::new(0.0, -h * kz0).exp();
    // Cramer
    let e_top = (rhs_top * sums.phi0 - rhs_bot * sums.phi_plus) / det;
    let e_bot = (sums.phi0 * rhs_bot - sums.phi_minus * rhs_top) / det;

    let m_lo = open.iter().min().unwrap() - 2;
    let m_hi = open.iter().max().unwrap() + 2;
    let mut refl = BTreeMap::new();
    let mut trans = BTreeMap::new();
    let pref = Complex64::new(0.0, 2.0 * PI * sums.delta0);
    for m in m_lo..=m_hi {
        let kzm = channel_wavenumber(pt, m).value;
        let kappa = pt.kappa(m);
        let i = Complex64::new(0.0, 1.0);
        let t = pref
            * (e_top * (-i * (shift * kappa + h * kzm)).exp() + e_bot * (i * h * kzm).exp())
            / kzm;
        let r = pref
            * (e_top * (i * (h * kzm - shift * kappa)).exp() + e_bot * (-i * h * kzm).exp())
            / kzm;
        trans.insert(m, t);
        refl.insert(m, r);
    }
    Ok((e_top, e_bot, refl, trans))
}

fn flux_error_of(
    pt: &BlochPoint,
    refl: &BTreeMap<i64, Complex64>,
    trans: &BTreeMap<i64, Complex64>,
) -> f64 {
    let kz0 = (pt.k() * pt.k() - pt.kx() * pt.kx()).sqrt();
    let mut flux = 0.0;
    for m in open_channels(pt) {
        let kzm = channel_wavenumber(pt, m).value.re;
        let r = refl[&m];
        let t = trans[&m] + if m == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        flux += kzm / kz0 * (r.norm_sqr() + t.norm_sqr());
    }
    (flux - 1.0).abs()
}

/// Solve the driven problem. The spectral point must not be a bound state
/// (there the homogeneous solutions make the answer non-unique).
pub fn solve(cfg: &ArrayConfig, pt: &BlochPoint, direction: Direction) -> Result<ScatteringSolution> {
    match direction {
        Direction::FromBelow => {
            let (e_top, e_bot, refl, trans) = kernel_solve(cfg, cfg.shift, pt)?;
            let flux_error = flux_error_of(pt, &refl, &trans);
            Ok(ScatteringSolution {
                e_left: e_bot,
                e_right: e_top,
                refl,
                trans,
                flux_error,
                k: pt.k(),
                kx: pt.kx(),
                direction,
            })
        }
        Direction::FromAbove => {
            // z → −z plus x → x − a maps the problem onto the FromBelow
            // kernel with shift −a; amplitudes pick up channel phases.
            let (e_top_t, e_bot_t, refl_t, trans_t) = kernel_solve(cfg, -cfg.shift, pt)?;
            let phase = |m: i64| Complex64::new(0.0, -2.0 * PI * cfg.shift * m as f64).exp();
            let refl: BTreeMap<i64, Complex64> =
                refl_t.iter().map(|(&m, &v)| (m, v * phase(m))).collect();
            let trans: BTreeMap<i64, Complex64> =
                trans_t.iter().map(|(&m, &v)| (m, v * phase(m))).collect();
            let bloch = Complex64::new(0.0, cfg.shift * pt.kx()).exp();
            let flux_error = flux_error_of(pt, &refl, &trans);
            Ok(ScatteringSolution {
                e_left: bloch * e_top_t,
                e_right: bloch * e_bot_t,
                refl,
                trans,
                flux_error,
                k: pt.k(),
                kx: pt.kx(),
                direction,
            })
        }
    }
}

/// Specular reflection coefficient |R₀|².
pub fn specular(cfg: &ArrayConfig, pt: &BlochPoint) -> Result<f64> {
    let sol = solve(cfg, pt, Direction::FromBelow)?;
    Ok(sol.refl[&0].norm_sqr())
}

/// Closed-form R₀ in continuum I at a = 0:
/// R₀ = −cos²(hk_z)/(cos²(hk_z) + ½ik_zΨ⁺) + sin²(hk_z)/(sin²(hk_z) + ½ik_zΨ⁻).
pub fn r0_closed_form(cfg: &ArrayConfig, pt: &BlochPoint) -> Result<Complex64> {
    if cfg.shift != 0.0 {
        return Err(Error::InvalidConfig("closed form holds at a = 0".into()));
    }
    let kz = (pt.k() * pt.k() - pt.kx() * pt.kx()).sqrt();
    let h = cfg.half_gap;
    let psi_p = psi_pm_c1(cfg, pt, PsiFamily::Plus)?;
    let psi_m = psi_pm_c1(cfg, pt, PsiFamily::Minus)?;
    let (c2, s2) = ((h * kz).cos().powi(2), (h * kz).sin().powi(2));
    let half_ikz = Complex64::new(0.0, 0.5 * kz);
    Ok(-c2 / (c2 + half_ikz * psi_p) + s2 / (s2 + half_ikz * psi_m))
}

/// A resonance of the specular coefficient: a root k_r of Ψ^{family}(h, ·)
/// with its Breit–Wigner half-width Γ.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Resonance {
    pub h: f64,
    pub k_r: f64,
    pub gamma: f64,
    pub family: PsiFamily,
}

/// All roots of Ψ^{family}(h, ·) on the one-open-channel interval.
pub fn resonances(cfg: &ArrayConfig, kx: f64, family: PsiFamily) -> Result<Vec<f64>> {
    let kx = kx.abs();
    let upper = 2.0 * PI - kx;
    let q_max = (upper * upper - kx * kx).sqrt();
    let f = |q: f64| {
        let k = (upper * upper - q * q).sqrt();
        if !(k > kx) {
            return f64::NAN;
        }
        psi_pm_c1(cfg, &BlochPoint::new(k, kx), family).unwrap_or(f64::NAN)
    };
    let grid = crate::bound_states::threshold_refined_grid(1e-8, q_max * (1.0 - 1e-9), 48, 160);
    let brackets = crate::bound_states::all_brackets(&f, &grid);
    if brackets.is_empty() {
        return Err(Error::NoRoot("no resonance root on the interval"));
    }
    let mut roots: Vec<f64> = brackets
        .into_iter()
        .map(|(lo, hi)| {
            let q = bisect_root(&f, lo, hi);
            (upper * upper - q * q).sqrt()
        })
        .collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Breit–Wigner half-width at a resonance root:
/// Γ = −2cos²(hk_z)/(k_z ∂ₖΨ⁺) on the Ψ⁺ family, the sin² analogue on Ψ⁻.
pub fn gamma_width(cfg: &ArrayConfig, kx: f64, k_r: f64, family: PsiFamily) -> Result<f64> {
    let pt = BlochPoint::new(k_r, kx);
    let kz = (k_r * k_r - kx * kx).sqrt();
    let h = cfg.half_gap;
    let dpsi = dpsi_pm_c1_dk(cfg, &pt, family)?;
    let trig2 = match family {
        PsiFamily::Plus => (h * kz).cos().powi(2),
        PsiFamily::Minus => (h * kz).sin().powi(2),
    };
    Ok(-2.0 * trig2 / (kz * dpsi))
}

/// The resonance nearest to `near_k` (or the one closest to the upper
/// threshold when no hint is given), with its width.
pub fn resonance_at(
    cfg: &ArrayConfig,
    kx: f64,
    family: PsiFamily,
    near_k: Option<f64>,
) -> Result<Resonance> {
    let roots = resonances(cfg, kx, family)?;
    let k_r = match near_k {
        Some(k0) => roots
            .iter()
            .copied()
            .min_by(|a, b| (a - k0).abs().partial_cmp(&(b - k0).abs()).unwrap())
            .unwrap(),
        None => *roots.last().unwrap(),
    };
    Ok(Resonance {
        h: cfg.half_gap,
        k_r,
        gamma: gamma_width(cfg, kx, k_r, family)?,
        family,
    })
}

/// Linearization data at a continuum-I bound state, for the principal-part
/// approximations of R₀ and the on-cylinder fields.
#[derive(Debug, Clone, Copy)]
pub struct BicLinearization {
    pub family: PsiFamily,
    pub n: u32,
    pub h_b: f64,
    pub k_b: f64,
    pub kz_b: f64,
    /// Value of the complementary Ψ at the bound state.
    pub psi_other: f64,
    /// ∂ₖ and ∂ₕ of the vanishing Ψ at the bound state.
    pub dk_psi: f64,
    pub dh_psi: f64,
}

/// Build the linearization at a continuum-I record.
pub fn linearize_at_bic(cfg: &ArrayConfig, record: &BoundStateRecord) -> Result<BicLinearization> {
    let (n, _) = record.indices.ok_or(Error::InvalidConfig(
        "record carries no standing-wave index".into(),
    ))?;
    let family = record.family.unwrap_or(PsiFamily::Plus);
    let other = match family {
        PsiFamily::Plus => PsiFamily::Minus,
        PsiFamily::Minus => PsiFamily::Plus,
    };
    let at = cfg.with_half_gap(record.h);
    let pt = BlochPoint::new(record.k, record.kx);
    Ok(BicLinearization {
        family,
        n,
        h_b: record.h,
        k_b: record.k,
        kz_b: (record.k * record.k - record.kx * record.kx).sqrt(),
        psi_other: psi_pm_c1(&at, &pt, other)?,
        dk_psi: dpsi_pm_c1_dk(&at, &pt, family)?,
        dh_psi: dpsi_pm_c1_dh(&at, &pt, family)?,
    })
}

impl BicLinearization {
    /// Linearized vanishing trig factor: cos(hk_z) on the Ψ⁺ family,
    /// sin(hk_z) on Ψ⁻.
    pub fn xi(&self, dh: f64, dk: f64) -> f64 {
        let slope = self.h_b * self.k_b / self.kz_b * dk + self.kz_b * dh;
        let sign = match self.family {
            // d cos(hk_z)/d(hk_z) = −sin(nπ/2) = (−1)ⁿ for odd n
            PsiFamily::Plus => {
                if self.n % 4 == 1 {
                    -1.0
                } else {
                    1.0
                }
            }
            // d sin(hk_z)/d(hk_z) = cos(nπ/2) = (−1)^{n/2} for even n
            PsiFamily::Minus => {
                if self.n % 4 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        };
        sign * slope
    }

    /// Linearized ½k_zΨ at (Δh, Δk).
    pub fn eta(&self, dh: f64, dk: f64) -> f64 {
        0.5 * self.kz_b * (self.dk_psi * dk + self.dh_psi * dh)
    }

    /// Principal part of R₀ near the bound state.
    pub fn r0_principal_part(&self, dh: f64, dk: f64) -> Complex64 {
        let xi = self.xi(dh, dk);
        let eta = self.eta(dh, dk);
        let constant = 1.0
            / (Complex64::new(1.0, 0.0) + Complex64::new(0.0, 0.5 * self.kz_b) * self.psi_other);
        let pole = xi * xi / Complex64::new(xi * xi, eta);
        match self.family {
            PsiFamily::Plus => constant - pole,
            PsiFamily::Minus => -constant + pole,
        }
    }

    /// The constant c in |E(on-cylinder)| ≈ c/|Δh| along the Ψ-curve
    /// through the bound state.
    pub fn field_divergence_constant(&self, cfg: &ArrayConfig) -> f64 {
        let d0 = delta0(self.k_b, cfg);
        let geom = 1.0 - self.h_b * self.k_b / (self.kz_b * self.kz_b) * self.dh_psi / self.dk_psi;
        1.0 / (4.0 * PI * d0 * geom.abs())
    }
}

/// One step of the near-field amplification sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AmplificationPoint {
    pub dh: f64,
    /// Resonance wavenumber k(h) on the family curve.
    pub k_r: f64,
    /// |E| on the cylinder at (a, h).
    pub e_abs: f64,
    pub gamma: f64,
    /// Principal-part prediction c/|Δh|.
    pub predicted_e_abs: f64,
}

/// Track the family curve k(h) through the n-th continuum-I bound state and
/// record the on-cylinder field magnitude at each Δh.
pub fn amplification_sweep(
    cfg: &ArrayConfig,
    kx: f64,
    n: u32,
    delta_h_list: &[f64],
) -> Result<Vec<AmplificationPoint>> {
    let records = crate::bound_states::find_continuum_c1(cfg, kx, n)?;
    let record = records
        .iter()
        .find(|r| r.indices == Some((n, None)))
        .ok_or(Error::NoRoot("requested bound state not found"))?;
    let lin = linearize_at_bic(cfg, record)?;
    let constant = lin.field_divergence_constant(cfg);
    let mut out = Vec::with_capacity(delta_h_list.len());
    for &dh in delta_h_list {
        assert!(dh != 0.0, "Δh = 0 is the bound state itself");
        let at = cfg.with_half_gap(record.h + dh);
        let res = resonance_at(&at, kx, lin.family, Some(record.k))?;
        let pt = BlochPoint::new(res.k_r, kx);
        let sol = solve(&at, &pt, Direction::FromBelow)?;
        out.push(AmplificationPoint {
            dh,
            k_r: res.k_r,
            e_abs: sol.e_right.norm(),
            gamma: res.gamma,
            predicted_e_abs: constant / dh.abs(),
        });
    }
    Ok(out)
}

/// Least-squares Lorentzian fit y ≈ A·γ²/((k−k₀)² + γ²) + B.
/// Three-point parabolic peak initialization followed by Gauss–Newton.
#[derive(Debug, Clone, Copy)]
pub struct LorentzFit {
    pub amplitude: f64,
    pub k0: f64,
    pub gamma: f64,
    pub background: f64,
}

pub fn fit_lorentzian(ks: &[f64], ys: &[f64]) -> LorentzFit {
    assert!(ks.len() == ys.len() && ks.len() >= 5);
    let (imax, &ymax) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let ymin = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    // parabolic refinement of the peak position through three points
    let k0 = if imax > 0 && imax + 1 < ks.len() {
        let (x1, y0, y1, y2) = (ks[imax], ys[imax - 1], ys[imax], ys[imax + 1]);
        let step = 0.5 * (ks[imax + 1] - ks[imax - 1]);
        let curv = y0 - 2.0 * y1 + y2;
        if curv < 0.0 {
            x1 + 0.5 * step * (y0 - y2) / curv
        } else {
            x1
        }
    } else {
        ks[imax]
    };
    // half-width at half max from the sampled profile
    let half = 0.5 * (ymax + ymin);
    let mut g = (ks[ks.len() - 1] - ks[0]) / 8.0;
    for i in imax..ys.len() {
        if ys[i] < half {
            g = ks[i] - ks[imax];
            break;
        }
    }
    let mut p = [ymax - ymin, k0, g.abs().max(1e-12), ymin];
    let model = |p: &[f64; 4], k: f64| {
        let d = k - p[1];
        p[0] * p[2] * p[2] / (d * d + p[2] * p[2]) + p[3]
    };
    for _ in 0..50 {
        // Gauss–Newton with numeric Jacobian on the 4 parameters
        let mut jtj = [[0.0f64; 4]; 4];
        let mut jtr = [0.0f64; 4];
        for (i, &k) in ks.iter().enumerate() {
            let r = model(&p, k) - ys[i];
            let mut grad = [0.0f64; 4];
            for j in 0..4 {
                let mut pp = p;
                let step = 1e-7 * (1.0 + pp[j].abs());
                pp[j] += step;
                grad[j] = (model(&pp, k) - model(&p, k)) / step;
            }
            for a in 0..4 {
                jtr[a] += grad[a] * r;
                for b in 0..4 {
                    jtj[a][b] += grad[a] * grad[b];
                }
            }
        }
        // solve (JtJ + λI) δ = −Jtr by Gaussian elimination
        let lambda = 1e-10 * (jtj[0][0] + jtj[1][1] + jtj[2][2] + jtj[3][3]);
        let mut m = jtj;
        for d in 0..4 {
            m[d][d] += lambda;
        }
        let mut rhs = [-jtr[0], -jtr[1], -jtr[2], -jtr[3]];
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
                .unwrap();
            m.swap(col, piv);
            rhs.swap(col, piv);
            let d = m[col][col];
            if d.abs() < 1e-300 {
                break;
            }
            for row in col + 1..4 {
                let f = m[row][col] / d;
                for c in col..4 {
                    m[row][c] -= f * m[col][c];
                }
                rhs[row] -= f * rhs[col];
            }
        }
        let mut delta = [0.0f64; 4];
        for row in (0..4).rev() {
            let mut acc = rhs[row];
            for c in row + 1..4 {
                acc -= m[row][c] * delta[c];
            }
            delta[row] = if m[row][row].abs() > 1e-300 {
                acc / m[row][row]
            } else {
                0.0
            };
        }
        for j in 0..4 {
            p[j] += delta[j];
        }
        p[2] = p[2].abs().max(1e-14);
    }
    LorentzFit {
        amplitude: p[0],
        k0: p[1],
        gamma: p[2],
        background: p[3],
    }
}

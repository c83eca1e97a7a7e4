//! Diffraction-channel bookkeeping on the spectral cylinder.
//!
//! A Bloch solution is labeled by the pair (k, kₓ) with k = ω/c and kₓ the
//! Bloch wavenumber (the period is the unit of length). The scattered wave in
//! channel m carries the z-wavenumber
//!
//! ```text
//! k_{z,m} = sqrt(k² − (kₓ + 2πm)²),
//! ```
//!
//! real for open (propagating) channels and `i·q_{z,m}` with
//! `q_{z,m} = sqrt((kₓ + 2πm)² − k²) > 0` for closed (evanescent) ones.
//! The thresholds `(2πn ± |[kₓ]|)²` partition the spectral cylinder into
//! regions with a fixed number of open channels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Reduce a Bloch wavenumber to the fundamental interval (−π, π].
pub fn reduce_kx(kx: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = kx % two_pi;
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

/// A point (k, kₓ) of the spectral cylinder, kₓ stored reduced to (−π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    k: f64,
    kx: f64,
}

impl BlochPoint {
    /// Build a spectral point; `kx` is reduced to (−π, π] once here so every
    /// downstream formula can use the reduced value.
    ///
    /// # Panics
    /// Panics if `k <= 0` or either argument is not finite.
    pub fn new(k: f64, kx: f64) -> Self {
        assert!(k.is_finite() && kx.is_finite(), "non-finite spectral point");
        assert!(k > 0.0, "wavenumber must be positive, got {k}");
        BlochPoint {
            k,
            kx: reduce_kx(kx),
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// The reduced Bloch wavenumber in (−π, π].
    pub fn kx(&self) -> f64 {
        self.kx
    }

    /// Transverse wavenumber of channel m, kₓ + 2πm.
    pub fn kappa(&self, m: i64) -> f64 {
        self.kx + 2.0 * PI * m as f64
    }

    /// Mirror in kₓ. The determinant Δ is even in kₓ, so searches may
    /// canonicalize to kₓ ∈ [0, π]; field synthesis uses the signed value.
    pub fn with_abs_kx(&self) -> Self {
        BlochPoint {
            k: self.k,
            kx: self.kx.abs(),
        }
    }
}

/// z-wavenumber of one diffraction channel at a spectral point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelWavenumber {
    /// Channel index.
    pub m: i64,
    /// k_{z,m}: real ≥ 0 when open, i·q_{z,m} when closed.
    pub value: Complex64,
    pub is_open: bool,
    /// Decay rate q_{z,m} = sqrt((kₓ+2πm)² − k²); only set when closed.
    pub q: Option<f64>,
}

/// Number of open channels at a spectral point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    BelowContinuum,
    ContinuumN(u32),
}

impl RegionTag {
    pub fn open_count(&self) -> u32 {
        match self {
            RegionTag::BelowContinuum => 0,
            RegionTag::ContinuumN(n) => *n,
        }
    }
}

/// k_{z,m} with the branch convention sqrt(k²−κ²) = i·sqrt(κ²−k²) for κ² > k².
/// A channel exactly at threshold (k² = κ²) is classified open with value 0;
/// consumers dividing by k_{z,m} must guard that case themselves.
pub fn channel_wavenumber(pt: &BlochPoint, m: i64) -> ChannelWavenumber {
    let kappa = pt.kappa(m);
    let disc = pt.k() * pt.k() - kappa * kappa;
    if disc >= 0.0 {
        ChannelWavenumber {
            m,
            value: Complex64::new(disc.sqrt(), 0.0),
            is_open: true,
            q: None,
        }
    } else {
        let q = (-disc).sqrt();
        ChannelWavenumber {
            m,
            value: Complex64::new(0.0, q),
            is_open: false,
            q: Some(q),
        }
    }
}

/// Real z-wavenumber of an open channel; panics if the channel is closed.
pub fn kz_open(pt: &BlochPoint, m: i64) -> f64 {
    let kappa = pt.kappa(m);
    let disc = pt.k() * pt.k() - kappa * kappa;
    assert!(disc >= 0.0, "channel {m} is closed at (k={}, kx={})", pt.k(), pt.kx());
    disc.sqrt()
}

/// Decay rate q_{z,m} of a closed channel; panics if the channel is open.
pub fn q_closed(pt: &BlochPoint, m: i64) -> f64 {
    let kappa = pt.kappa(m);
    let disc = kappa * kappa - pt.k() * pt.k();
    assert!(disc > 0.0, "channel {m} is open at (k={}, kx={})", pt.k(), pt.kx());
    disc.sqrt()
}

/// Sorted list of all open channel indices (k² ≥ (kₓ+2πm)²); empty below the
/// continuum.
pub fn open_channels(pt: &BlochPoint) -> Vec<i64> {
    // |kx + 2πm| <= k  =>  m in [(-k - kx)/2π, (k - kx)/2π]
    let lo = ((-pt.k() - pt.kx()) / (2.0 * PI)).floor() as i64;
    let hi = ((pt.k() - pt.kx()) / (2.0 * PI)).ceil() as i64;
    (lo..=hi)
        .filter(|&m| {
            let kappa = pt.kappa(m);
            pt.k() * pt.k() >= kappa * kappa
        })
        .collect()
}

/// Diffraction thresholds 𝓔_{±n}(kₓ) = (2πn ± |[kₓ]|)², emitted in the
/// nondecreasing order 𝓔₀ ≤ 𝓔₋₁ ≤ 𝓔₁ ≤ 𝓔₋₂ ≤ 𝓔₂ ≤ … (2·n_max + 1 values).
pub fn thresholds(kx: f64, n_max: u32) -> Vec<f64> {
    let akx = reduce_kx(kx).abs();
    let mut out = Vec::with_capacity(2 * n_max as usize + 1);
    out.push(akx * akx);
    for n in 1..=n_max {
        let base = 2.0 * PI * n as f64;
        out.push((base - akx) * (base - akx)); // 𝓔_{-n}
        out.push((base + akx) * (base + akx)); // 𝓔_{+n}
    }
    out
}

/// Region label: `BelowContinuum` iff no channel is open.
pub fn classify(pt: &BlochPoint) -> RegionTag {
    let n = open_channels(pt).len() as u32;
    if n == 0 {
        RegionTag::BelowContinuum
    } else {
        RegionTag::ContinuumN(n)
    }
}

//! Bound-state searches: below the radiation continuum, continuum I (one
//! open channel), continuum II (two open channels), and the diophantine
//! points with three or more open channels.
//!
//! All families reduce to roots of real dispersion functions Ψ built from
//! the lattice sums. Below the continuum the determinant factorizes as
//! Δ = −Ψ⁺Ψ⁻ with Ψ± = Φ* ∓ √(Φc² + Φs²). In continuum I the standing-wave
//! condition sin(2h k_z) = 0 pins h = nπ/(2k_z) and turns Δ = 0 into the
//! countable family Ψₙ(k) = 0; in continuum II the pinned channel is m = −1
//! and a second quantization φₙ(kₓ) = lπ selects a discrete, dense set of
//! Bloch wavenumbers. Every Ψₙ is strictly decreasing in k, so bisection on
//! a sign-change bracket is globally safe; near the thresholds the searches
//! switch to the decay rate q of the dominant evanescent channel as the
//! bracketing variable, which removes the square-root singularity.

mod below;
mod continuum1;
mod continuum2;
mod diophantine;
mod psi;
mod search;

pub use below::{find_below, find_below_minus, psi_pm_below};
pub use continuum1::{
    existence_gate_c1, find_continuum_c1, gate_constant_c1, psi_n_c1, psi_n_c1_dk,
};
pub use continuum2::{
    enumerate_kx_c2, existence_gate_c2, find_continuum_c2, gate_constant_c2, k_infinity, k_n_c2,
    phi_infinity, phi_n_c2, psi_infinity, psi_n_c2, psi_n_c2_dk, schlomilch_constant_s,
    two_channel_system_residuals,
};
pub use diophantine::{diophantine_n, diophantine_point, DiophantineRecord};
pub use psi::{
    dpsi_pm_c1_dh, dpsi_pm_c1_dk, psi_pm_c1, PsiFamily,
};
pub use search::{all_brackets, bisect_root, threshold_refined_grid};

use crate::channels::RegionTag;
use serde::{Deserialize, Serialize};

/// Symmetry class under P_a: E(x+a, −z) = ±e^{iakₓ}E(x, z). Assignable only
/// for a ∈ {0, 1/2}; intermediate shifts are left unclassified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    Symmetric,
    SkewSymmetric,
    Unclassified,
}

/// One located bound state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundStateRecord {
    pub region: RegionTag,
    /// (n, l): n is the standing-wave index of the pinned channel
    /// (m = 0 below/continuum I, m = −1 in continuum II); l is the second
    /// quantization index in continuum II.
    pub indices: Option<(u32, Option<u32>)>,
    pub kx: f64,
    pub k: f64,
    pub h: f64,
    pub a: f64,
    /// |Δ(a, h, k, kₓ)| at the accepted root.
    pub residual_delta: f64,
    pub symmetry: Symmetry,
    /// Leading-order perturbative wavenumber, when the family admits one.
    pub approx_k: Option<f64>,
    /// Which of Ψ⁺/Ψ⁻ vanished (below continuum and resonance bookkeeping).
    pub family: Option<psi::PsiFamily>,
}

/// Existence gate: positivity of the threshold limit of Ψₙ, evaluated as the
/// full series (authoritative) plus the closed-form radius bound (precheck).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExistenceGate {
    pub holds: bool,
    /// Full-series positivity condition, left side.
    pub lhs: f64,
    /// Full-series positivity condition, right side.
    pub rhs: f64,
    pub kind: GateKind,
    /// Closed-form precheck R√(ε_c −1) < C·(…) — a fast necessary check.
    pub precheck: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateKind {
    ContinuumI,
    ContinuumII,
}

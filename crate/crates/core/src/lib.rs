//! Electromagnetic bound states in and below the radiation continuum for a
//! periodic double array of thin dielectric cylinders (TM polarization).
//!
//! The structure is two parallel gratings of parallel cylinders, one period
//! apart along `x`, separated by a distance `2h` along `z` and mutually
//! shifted by `a` along `x`. In the thin-cylinder limit each cylinder acts as
//! a monopole line source of strength `δ₀ = (kR/2)²(ε_c − 1)`, and the whole
//! electromagnetic problem reduces to a 2×2 linear system on the two
//! on-cylinder field values whose coefficients are slowly convergent lattice
//! sums over diffraction channels.
//!
//! Module layout:
//!
//! * [`channels`] — diffraction-channel bookkeeping on the spectral cylinder:
//!   per-channel z-wavenumbers, open/closed classification, thresholds.
//! * [`lattice_sums`] — certified evaluation of the channel sums Φ₀, Φ± and
//!   the real auxiliary sums Φ*, Φc, Φs.
//! * [`bound_states`] — root searches for all bound-state families: below the
//!   continuum, one and two open channels, and the diophantine N ≥ 3 points.
//! * [`scattering`] — the driven problem: on-cylinder fields, channel
//!   amplitudes, specular reflection, resonance widths, near-field
//!   amplification.
//! * [`fields`] — field maps E(x, z) for bound states and scattering
//!   solutions on rectangular grids, with CSV export support.
//! * [`oracles`] — independent brute-force validators (regularized direct
//!   Hankel sums, finite differences) used by the test suites.
//! * [`special`] — the special functions the above need (Hankel H₀ of complex
//!   argument, digamma, Hurwitz-zeta tails).

pub mod bound_states;
pub mod channels;
pub mod error;
pub mod fields;
pub mod lattice_sums;
pub mod oracles;
pub mod scattering;
pub mod special;

pub use channels::{BlochPoint, ChannelWavenumber, RegionTag};
pub use error::Error;
pub use lattice_sums::{ArrayConfig, LatticeSums};

/// Default absolute tolerance for truncated lattice sums.
///
/// Roots of the dispersion functions are later located to ~1e-12 in the
/// bracketing variable, so the series underneath must be at least this tight.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Guard on |k_{z,m}|: channels closer to threshold than this make the sums
/// singular rather than silently huge.
pub const THRESHOLD_GUARD: f64 = 1e-9;

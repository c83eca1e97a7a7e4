//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by lattice sums, root searches and scattering solves.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A channel wavenumber is within the threshold guard of zero, so the
    /// 1/k_{z,m} sums are singular. The divergence is physical; callers that
    /// bracket roots must step around it.
    #[error("channel m={m} is within {guard:e} of its diffraction threshold (|k_z|={kz_abs:e})")]
    ThresholdSingularity { m: i64, kz_abs: f64, guard: f64 },

    /// A sign-change bracket could not be established on the search interval.
    #[error("no sign change of {function} on ({lo}, {hi})")]
    NoBracket {
        function: &'static str,
        lo: f64,
        hi: f64,
    },

    /// A requested root does not exist for these parameters.
    #[error("no root: {0}")]
    NoRoot(&'static str),

    /// The existence gate (positivity of the threshold limit) fails, so the
    /// bound-state family cannot exist for these parameters.
    #[error("existence gate failed: lhs={lhs} <= rhs={rhs}")]
    GateFailed { lhs: f64, rhs: f64 },

    /// The driven 2x2 system is singular: the requested point is (numerically)
    /// a bound state in the continuum and the scattering solution is not
    /// unique there.
    #[error("scattering system is singular at this point (|det|={det_abs:e} < {guard:e}·scale)")]
    SingularSystem { det_abs: f64, guard: f64 },

    /// Diophantine triple with 2n0² = n1² + n2² (the channel relations
    /// degenerate and determine no point).
    #[error("degenerate diophantine tuple: 2·{n0}² = {n1}² + {n2}²")]
    DegenerateTriple { n0: u32, n1: u32, n2: u32 },

    /// Richardson extrapolation of the eta-regularized sum did not settle.
    #[error("eta-extrapolation diverged: residual {residual:e}")]
    ExtrapolationDiverged { residual: f64 },

    /// Configuration violates an invariant (radius, permittivity, shift...).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Bracketing and bisection helpers for the monotone dispersion functions.
//!
//! Roots accumulate at the diffraction thresholds (the evanescent 1/q must
//! balance 1/(2πδ₀)), so scan grids are log-refined toward q → 0 and the
//! bracketing variable is q itself rather than k. Derivatives blow up at the
//! interval endpoints, so Newton steps are avoided entirely; the Ψ functions
//! are monotone and bisection is globally safe.

/// Bisection on a sign-change bracket: f(lo) and f(hi) must have opposite
/// signs. Iterates until the interval is at machine resolution.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    assert!(
        f_lo * f_hi <= 0.0,
        "bisect_root needs a sign change: f({lo})={f_lo}, f({hi})={f_hi}"
    );
    for _ in 0..110 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at f64 resolution
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan grid in the decay-rate variable: log-spaced points packed toward
/// q = 0 followed by a uniform sweep up to `q_max`.
pub fn threshold_refined_grid(q_min: f64, q_max: f64, n_log: usize, n_lin: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(n_log + n_lin);
    let split = 0.1 * q_max;
    let lo = q_min.max(1e-12 * q_max);
    for i in 0..n_log {
        let t = i as f64 / (n_log - 1) as f64;
        grid.push(lo * (split / lo).powf(t));
    }
    for i in 1..=n_lin {
        let t = i as f64 / n_lin as f64;
        grid.push(split + t * (q_max - split));
    }
    grid
}

/// First sign-change bracket of `f` along `grid` (skipping non-finite
/// values), or None.
pub fn first_bracket<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Option<(f64, f64)> {
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let y = f(x);
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if py * y <= 0.0 {
                return Some((px, x));
            }
        }
        prev = Some((x, y));
    }
    None
}

/// All sign-change brackets of `f` along `grid`.
pub fn all_brackets<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in grid {
        let y = f(x);
        if !y.is_finite() {
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if py * y <= 0.0 && py != 0.0 {
                out.push((px, x));
            }
        }
        prev = Some((x, y));
    }
    out
}

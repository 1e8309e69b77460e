//! Bracketed scalar root finding.
//!
//! Secant proposals accelerate convergence, a forced bisection every other
//! step guarantees the bracket at least halves every two iterations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootCfg {
    /// Absolute tolerance on the bracket width.
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl Default for RootCfg {
    fn default() -> Self {
        Self { abs_tol: 1e-13, max_iter: 220 }
    }
}

impl RootCfg {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }
}

/// Root of `f` inside `[lo, hi]`; the endpoints must bracket a sign change.
pub fn solve_bracketed(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cfg: RootCfg) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    for it in 0..cfg.max_iter {
        let w = b - a;
        let mid = 0.5 * (a + b);
        if w <= cfg.abs_tol + 4.0 * f64::EPSILON * mid.abs() {
            return Ok(mid);
        }
        // odd iterations bisect, even ones try a clamped secant step
        let mut x = if it % 2 == 1 || fb == fa {
            mid
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        if !x.is_finite() || x <= a || x >= b {
            x = mid;
        }
        // keep proposals off the bracket endpoints
        let margin = 1e-3 * w;
        x = x.clamp(a + margin, b - margin);
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::Convergence { what: "root iteration (non-finite f)", iterations: it });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Err(Error::Convergence { what: "bracketed root", iterations: cfg.max_iter })
}

/// Grow `[lo, hi]` geometrically around its midpoint until `f` changes sign.
pub fn expand_bracket(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    max_expand: usize,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..=max_expand {
        let (fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            return Ok((a, a));
        }
        if fb == 0.0 {
            return Ok((b, b));
        }
        if fa.is_finite() && fb.is_finite() && fa.signum() != fb.signum() {
            return Ok((a, b));
        }
        let w = b - a;
        a -= 0.5 * w;
        b += 0.5 * w;
    }
    Err(Error::Bracket { lo, hi })
}

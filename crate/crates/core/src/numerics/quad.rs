//! Adaptive quadrature built on a 15-point Gauss-Legendre panel rule.
//!
//! Nodes and weights are computed once by Newton iteration on the Legendre
//! polynomial, so there are no transcribed coefficient tables to get wrong.
//! The error estimate for a panel is |two half panels - whole panel|; panels
//! split until the estimate fits their share of the tolerance budget.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const PANEL_N: usize = 15;

#[derive(Debug, Clone, Copy)]
pub struct QuadCfg {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on processed panels; exceeded means `Error::Quadrature`.
    pub max_panels: usize,
}

impl Default for QuadCfg {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-12, max_panels: 400_000 }
    }
}

impl QuadCfg {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self { abs_tol, ..Self::default() }
    }
}

/// Legendre P_n roots and weights on [-1, 1] via Newton from the Chebyshev guess.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // recurrence for P_n(x) and P_{n-1}(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 1..n {
                let kf = k as f64;
                let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_N))
}

fn panel(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = panel_rule();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        acc += w * f(c + h * x);
    }
    acc * h
}

/// Integral of `f` over `[a, b]` (either orientation) to the given tolerances.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, cfg: QuadCfg) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, cfg).map(|v| -v);
    }
    let rough = panel(&f, a, b);
    if !rough.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    // stack entries: (lo, hi, whole-panel estimate, tolerance share)
    let tol0 = cfg.abs_tol.max(cfg.rel_tol * rough.abs());
    let mut stack = vec![(a, b, rough, tol0)];
    let mut total = 0.0;
    let mut used = 0usize;
    while let Some((lo, hi, whole, tol)) = stack.pop() {
        used += 1;
        if used > cfg.max_panels {
            return Err(Error::Quadrature(format!(
                "panel budget {} exhausted on [{a}, {b}]",
                cfg.max_panels
            )));
        }
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let refined = left + right;
        if !refined.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo}, {hi}]")));
        }
        let err = (refined - whole).abs();
        if err <= tol || (hi - lo) <= 16.0 * f64::EPSILON * (lo.abs() + hi.abs() + 1.0) {
            total += refined;
        } else {
            stack.push((lo, mid, left, 0.5 * tol));
            stack.push((mid, hi, right, 0.5 * tol));
        }
    }
    Ok(total)
}

/// Same as [`integrate`], forcing panel edges at the interior `breakpoints`
/// (places where the integrand loses smoothness).
pub fn integrate_with_breakpoints(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: QuadCfg,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate_with_breakpoints(f, b, a, breakpoints, cfg).map(|v| -v);
    }
    let mut edges: Vec<f64> = vec![a];
    let mut pts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    edges.extend(pts);
    edges.push(b);
    let n = (edges.len() - 1) as f64;
    let sub = QuadCfg { abs_tol: cfg.abs_tol / n, ..cfg };
    let mut total = 0.0;
    for pair in edges.windows(2) {
        total += integrate(&f, pair[0], pair[1], sub)?;
    }
    Ok(total)
}

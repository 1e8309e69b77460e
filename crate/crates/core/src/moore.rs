//! Moore functions for the wave equation in a cavity with one moving wall.
//!
//! A Moore function R maps null rays so that the field becomes free: mode
//! functions are differences of plane waves in R(t +/- x). The boundary
//! condition at the moving wall forces
//!
//! ```text
//! R(t + L(t)) - R(t - L(t)) = 2,
//! ```
//!
//! and before the wall moves R(z) = z / L_in. Two sources are supported:
//! direct recursion on any physical worldline (bounce the null ray back
//! until it reaches the static in-region), and the WKB phase of a
//! reference trajectory, which solves the equation exactly along the
//! derived effective trajectory.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::root::{solve_bracketed, RootCfg};
use crate::sta::EffectiveTrajectory;
use crate::trajectory::{validate_with, Trajectory, Worldline};

/// Hard cap on bounces per evaluation; reached only for absurd arguments.
const MAX_BOUNCES: usize = 100_000;

/// Default sample count for residual extraction.
pub const RESIDUAL_SAMPLES: usize = 512;

enum Source {
    Recursion(Arc<dyn Worldline>),
    Wkb(Box<EffectiveTrajectory>),
}

/// R together with a memo cache of (R, R', R'', R''') keyed by the ray
/// coordinate's bit pattern.
pub struct MooreFunction {
    source: Source,
    cache: RwLock<HashMap<u64, [f64; 4]>>,
}

impl MooreFunction {
    /// Solve by bouncing rays off the given worldline. The worldline must
    /// be physical (L > 0, |L'| < 1) for the bounce map to be invertible.
    pub fn recursion(worldline: Arc<dyn Worldline>) -> Result<Self> {
        let report = validate_with(&*worldline, 801);
        if !report.physical {
            return Err(Error::InvalidTrajectory(format!(
                "ray bouncing needs L > 0 and |L'| < 1, but min L = {}, max |L'| = {}",
                report.min_length, report.max_speed
            )));
        }
        Ok(Self { source: Source::Recursion(worldline), cache: RwLock::new(HashMap::new()) })
    }

    pub fn recursion_from(trajectory: Trajectory) -> Result<Self> {
        Self::recursion(Arc::new(trajectory))
    }

    /// WKB phase of `reference`, exact along the derived effective
    /// trajectory (which becomes this function's boundary).
    pub fn wkb(reference: Arc<dyn Worldline>) -> Result<Self> {
        Ok(Self::from_effective(EffectiveTrajectory::new(reference)?))
    }

    pub fn wkb_from(reference: Trajectory) -> Result<Self> {
        Self::wkb(Arc::new(reference))
    }

    pub fn from_effective(effective: EffectiveTrajectory) -> Self {
        Self { source: Source::Wkb(Box::new(effective)), cache: RwLock::new(HashMap::new()) }
    }

    /// The boundary this Moore function belongs to.
    pub fn worldline(&self) -> &dyn Worldline {
        match &self.source {
            Source::Recursion(w) => &**w,
            Source::Wkb(eff) => &**eff,
        }
    }

    /// Cavity length at time `t`.
    pub fn boundary_length(&self, t: f64) -> f64 {
        self.worldline().length(t)
    }

    pub fn value(&self, z: f64) -> Result<f64> {
        Ok(self.solve_full(z)?[0])
    }

    /// (R', R'', R''') at `z`.
    pub fn derivs(&self, z: f64) -> Result<[f64; 3]> {
        let v = self.solve_full(z)?;
        Ok([v[1], v[2], v[3]])
    }

    pub fn value_and_derivs(&self, z: f64) -> Result<[f64; 4]> {
        self.solve_full(z)
    }

    /// R(t + L(t)) - R(t - L(t)) - 2; zero up to solver tolerance.
    pub fn moore_residual(&self, t: f64) -> Result<f64> {
        let l = self.boundary_length(t);
        Ok(self.value(t + l)? - self.value(t - l)? - 2.0)
    }

    /// Mode function phi_n(t, x) inside the cavity.
    pub fn mode_function(&self, n: usize, t: f64, x: f64) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::Domain("mode index must be at least 1".into()));
        }
        let l = self.boundary_length(t);
        if !(0.0..=l).contains(&x) {
            return Err(Error::Domain(format!("x = {x} outside cavity [0, {l}] at t = {t}")));
        }
        let npi = n as f64 * std::f64::consts::PI;
        let plus = self.value(t + x)?;
        let minus = self.value(t - x)?;
        let wave = |r: f64| Complex64::from_polar(1.0, -npi * r);
        Ok((wave(plus) - wave(minus)) / (4.0 * std::f64::consts::PI * n as f64).sqrt())
    }

    /// Ray coordinates in [a, b] where R has reduced smoothness: junction
    /// times mapped forward through repeated wall bounces.
    pub fn kinks_between(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        match &self.source {
            // the WKB phase inherits its kinks directly from the reference
            Source::Wkb(eff) => {
                for j in eff.reference().junctions() {
                    if j >= a && j <= b {
                        out.push(j);
                    }
                }
            }
            Source::Recursion(w) => {
                for j in w.junctions() {
                    let mut s = j + w.length(j);
                    let mut guard = 0;
                    while s <= b && guard < 10_000 {
                        if s >= a {
                            out.push(s);
                        }
                        s = ray_advance(&**w, s)?;
                        guard += 1;
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        Ok(out)
    }

    fn solve_full(&self, z: f64) -> Result<[f64; 4]> {
        match &self.source {
            Source::Wkb(eff) => {
                let phase = eff.phase();
                let r = phase.phi(z)?;
                let (d1, d2, d3) = phase.phi_derivs(z)?;
                Ok([r, d1, d2, d3])
            }
            Source::Recursion(w) => self.solve_recursion(&**w, z),
        }
    }

    /// Walk the bounce chain down to the static in-region, then propagate
    /// value and derivatives back up through each bounce map
    /// B(z) = t - L(t) with t solving t + L(t) = z.
    fn solve_recursion(&self, w: &dyn Worldline, z: f64) -> Result<[f64; 4]> {
        let (blo, bhi) = w.length_bounds();
        let l_in = w.in_length();
        let z_in = w.motion_window().0 + l_in;
        let mut stack: Vec<(f64, f64, f64, f64)> = Vec::new();
        let mut cur = z;
        let mut vals: Option<[f64; 4]> = None;
        for _ in 0..MAX_BOUNCES {
            if cur <= z_in {
                vals = Some([cur / l_in, 1.0 / l_in, 0.0, 0.0]);
                break;
            }
            if let Some(hit) = self.cache.read().unwrap().get(&cur.to_bits()) {
                vals = Some(*hit);
                break;
            }
            let margin = 1e-9 * (1.0 + cur.abs());
            let t = solve_bracketed(
                |t| t + w.length(t) - cur,
                cur - bhi - margin,
                cur - blo + margin,
                RootCfg::with_tol(5e-14 * (1.0 + cur.abs())),
            )?;
            let d = w.derivs(t)?;
            let d3 = w.third_deriv(t)?;
            let denom = 1.0 + d.speed;
            let b1 = (1.0 - d.speed) / denom;
            let b2 = -2.0 * d.accel / denom.powi(3);
            let b3 = -2.0 * d3 / denom.powi(4) + 6.0 * d.accel * d.accel / denom.powi(5);
            stack.push((cur, b1, b2, b3));
            cur = t - d.length;
        }
        let mut vals = vals.ok_or(Error::Convergence {
            what: "moore bounce chain",
            iterations: MAX_BOUNCES,
        })?;
        for &(level, b1, b2, b3) in stack.iter().rev() {
            let [r, r1, r2, r3] = vals;
            vals = [
                r + 2.0,
                r1 * b1,
                r2 * b1 * b1 + r1 * b2,
                r3 * b1 * b1 * b1 + 3.0 * r2 * b1 * b2 + r1 * b3,
            ];
            self.cache.write().unwrap().insert(level.to_bits(), vals);
        }
        Ok(vals)
    }
}

/// Advance a null ray one full bounce: given z = t - L(t) at the wall
/// reflection, return t + L(t).
pub fn ray_advance(w: &dyn Worldline, z: f64) -> Result<f64> {
    let (blo, bhi) = w.length_bounds();
    let margin = 1e-9 * (1.0 + z.abs());
    let t = solve_bracketed(
        |t| t - w.length(t) - z,
        z + blo - margin,
        z + bhi + margin,
        RootCfg::with_tol(5e-14 * (1.0 + z.abs())),
    )?;
    Ok(t + w.length(t))
}

/// Deviation of R from uniform advance after the wall has stopped.
///
/// After motion ends R(z) - z / L_out is periodic with period 2 L_out; a
/// perfectly adiabatic (or shortcut) evolution leaves it constant. The
/// residual is the deviation of that function from its mean over one
/// period, sampled from one light-crossing past the end of motion.
#[derive(Debug, Clone)]
pub struct Residual {
    pub period: f64,
    pub sup_deviation: f64,
    pub l2_deviation: f64,
    /// Largest |d(t) - d(t + period)|; checks the periodicity assumption.
    pub periodicity_gap: f64,
    /// (t, deviation from mean) samples over one period.
    pub samples: Vec<(f64, f64)>,
}

pub fn extract_residual(moore: &MooreFunction, n: usize) -> Result<Residual> {
    let w = moore.worldline();
    let (_, t_end) = w.motion_window();
    let l_out = w.out_length();
    let period = 2.0 * l_out;
    let t0 = t_end + l_out;
    let n = n.max(16);
    let mut ds = Vec::with_capacity(n);
    let mut gap: f64 = 0.0;
    for i in 0..n {
        let t = t0 + period * i as f64 / n as f64;
        let d = moore.value(t)? - t / l_out;
        let shifted = moore.value(t + period)? - (t + period) / l_out;
        gap = gap.max((d - shifted).abs());
        ds.push((t, d));
    }
    let mean = ds.iter().map(|&(_, d)| d).sum::<f64>() / n as f64;
    let mut sup: f64 = 0.0;
    let mut l2 = 0.0;
    let samples: Vec<(f64, f64)> = ds
        .into_iter()
        .map(|(t, d)| {
            let dev = d - mean;
            sup = sup.max(dev.abs());
            l2 += dev * dev;
            (t, dev)
        })
        .collect();
    Ok(Residual {
        period,
        sup_deviation: sup,
        l2_deviation: (l2 / n as f64).sqrt(),
        periodicity_gap: gap,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sta::WkbPhase;

    fn smoothstep() -> Trajectory {
        Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap()
    }

    #[test]
    fn static_cavity_gives_linear_moore_function() {
        let moore = MooreFunction::recursion_from(Trajectory::static_cavity(1.0).unwrap()).unwrap();
        for &z in &[-3.0, 0.2, 1.0, 4.9, 17.3] {
            assert!((moore.value(z).unwrap() - z).abs() < 1e-11, "z={z}");
            let d = moore.derivs(z).unwrap();
            assert!((d[0] - 1.0).abs() < 1e-11);
            assert!(d[1].abs() < 1e-9);
            assert!(d[2].abs() < 1e-8);
        }
    }

    #[test]
    fn moore_equation_holds_along_the_wall() {
        let moore = MooreFunction::recursion_from(smoothstep()).unwrap();
        for i in 0..40 {
            let t = -0.5 + 3.0 * i as f64 / 39.0;
            let r = moore.moore_residual(t).unwrap();
            assert!(r.abs() < 1e-10, "t={t}: residual {r}");
        }
    }

    #[test]
    fn recursion_matches_pure_bisection_oracle() {
        // independent chain: plain bisection for each bounce, no caching
        let tr = smoothstep();
        let oracle = |z: f64| {
            let mut cur = z;
            let mut bounces = 0;
            while cur > 1.0 {
                let (mut lo, mut hi) = (cur - 1.0 - 1e-6, cur - 0.7 + 1e-6);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid + tr.length(mid) < cur {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let t = 0.5 * (lo + hi);
                cur = t - tr.length(t);
                bounces += 1;
            }
            cur / 1.0 + 2.0 * bounces as f64
        };
        let moore = MooreFunction::recursion_from(tr.clone()).unwrap();
        for &z in &[1.3, 2.0, 3.0, 5.5, 8.1] {
            let got = moore.value(z).unwrap();
            let want = oracle(z);
            assert!((got - want).abs() < 1e-11, "z={z}: {got} vs {want}");
        }
        // frozen spot value from the oracle at z = 3
        assert!((moore.value(3.0).unwrap() - oracle(3.0)).abs() < 1e-11);
    }

    #[test]
    fn derivatives_match_finite_differences_of_value() {
        let moore = MooreFunction::recursion_from(smoothstep()).unwrap();
        let h = 1e-5;
        for &z in &[1.4, 2.3, 3.7, 6.2] {
            let d = moore.derivs(z).unwrap();
            let vm = moore.value(z - h).unwrap();
            let v0 = moore.value(z).unwrap();
            let vp = moore.value(z + h).unwrap();
            let fd1 = (vp - vm) / (2.0 * h);
            assert!(((d[0] - fd1) / d[0]).abs() < 1e-7, "z={z}: {} vs {fd1}", d[0]);
            let fd2 = (vp - 2.0 * v0 + vm) / (h * h);
            assert!(((d[1] - fd2) / (1.0 + d[1].abs())).abs() < 1e-4);
            let g = 1e-4;
            let fd3 = (moore.derivs(z + g).unwrap()[1] - moore.derivs(z - g).unwrap()[1])
                / (2.0 * g);
            assert!(((d[2] - fd3) / (1.0 + d[2].abs())).abs() < 1e-4, "z={z}: {} vs {fd3}", d[2]);
        }
    }

    #[test]
    fn moore_function_is_increasing() {
        let moore = MooreFunction::recursion_from(smoothstep()).unwrap();
        let mut prev = moore.value(-1.0).unwrap();
        for i in 1..200 {
            let z = -1.0 + 8.0 * i as f64 / 199.0;
            let v = moore.value(z).unwrap();
            assert!(v > prev, "not increasing at z={z}");
            prev = v;
        }
    }

    #[test]
    fn wkb_source_returns_the_phase_and_tiny_residual() {
        let moore = MooreFunction::wkb_from(smoothstep()).unwrap();
        let phase = WkbPhase::new(Arc::new(smoothstep())).unwrap();
        for &z in &[-1.0, 0.3, 0.9, 2.5] {
            assert!((moore.value(z).unwrap() - phase.phi(z).unwrap()).abs() < 1e-13);
        }
        for &t in &[-0.8, 0.1, 0.62, 1.4, 3.0] {
            let r = moore.moore_residual(t).unwrap();
            assert!(r.abs() < 1e-10, "t={t}: {r}");
        }
    }

    #[test]
    fn recursion_on_effective_equals_wkb_phase() {
        let eff = EffectiveTrajectory::from_trajectory(smoothstep()).unwrap();
        let phase = eff.phase().clone();
        let rec = MooreFunction::recursion(Arc::new(eff)).unwrap();
        for i in 0..60 {
            let z = -1.5 + 6.0 * i as f64 / 59.0;
            let a = rec.value(z).unwrap();
            let b = phase.phi(z).unwrap();
            assert!((a - b).abs() < 1e-9, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn sta_residual_beats_raw_trajectory() {
        let raw = MooreFunction::recursion_from(smoothstep()).unwrap();
        let raw_res = extract_residual(&raw, 128).unwrap();
        let eff = EffectiveTrajectory::from_trajectory(smoothstep()).unwrap();
        let sta = MooreFunction::recursion(Arc::new(eff)).unwrap();
        let sta_res = extract_residual(&sta, 128).unwrap();
        assert!(raw_res.sup_deviation > 1e-5, "raw residual {}", raw_res.sup_deviation);
        assert!(sta_res.sup_deviation < 1e-8, "sta residual {}", sta_res.sup_deviation);
        assert!(sta_res.sup_deviation * 100.0 < raw_res.sup_deviation);
        // both see a genuinely periodic tail
        assert!(raw_res.periodicity_gap < 1e-9);
        assert!(sta_res.periodicity_gap < 1e-9);
    }

    #[test]
    fn static_residual_vanishes() {
        let moore = MooreFunction::recursion_from(Trajectory::static_cavity(1.0).unwrap()).unwrap();
        let res = extract_residual(&moore, 64).unwrap();
        assert!(res.sup_deviation < 1e-11);
        assert_eq!(res.period, 2.0);
    }

    #[test]
    fn mode_functions_vanish_on_both_walls() {
        let moore = MooreFunction::recursion_from(smoothstep()).unwrap();
        for &t in &[-0.5, 0.3, 0.8, 2.0] {
            let l = moore.boundary_length(t);
            for n in 1..=3 {
                assert!(moore.mode_function(n, t, 0.0).unwrap().norm() < 1e-10);
                assert!(moore.mode_function(n, t, l).unwrap().norm() < 1e-9);
            }
        }
        // outside the cavity is a domain error
        assert!(moore.mode_function(1, 0.0, 1.5).is_err());
        assert!(moore.mode_function(0, 0.0, 0.5).is_err());
    }

    #[test]
    fn static_modes_have_the_textbook_shape() {
        let moore = MooreFunction::recursion_from(Trajectory::static_cavity(1.0).unwrap()).unwrap();
        let n = 2;
        for &x in &[0.1, 0.25, 0.6] {
            let got = moore.mode_function(n, 0.7, x).unwrap().norm();
            let want = (n as f64 * std::f64::consts::PI * x).sin().abs()
                / (std::f64::consts::PI * n as f64).sqrt();
            assert!((got - want).abs() < 1e-10, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn ray_advance_matches_dense_scan() {
        let tr = smoothstep();
        let z = -0.3;
        // dense scan + bisection oracle for t - L(t) = z
        let (mut lo, mut hi) = (z, z + 1.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - tr.length(mid) < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let want = t + tr.length(t);
        let got = ray_advance(&tr, z).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn kinks_propagate_with_the_bounce_period() {
        let moore = MooreFunction::recursion_from(smoothstep()).unwrap();
        let kinks = moore.kinks_between(0.5, 4.0).unwrap();
        // seeds: 0 + L(0) = 1 and 1 + L(1) = 1.7, then advance by 1.4
        let expect = [1.0, 1.7, 2.4, 3.1, 3.8];
        assert_eq!(kinks.len(), expect.len(), "kinks: {kinks:?}");
        for (k, e) in kinks.iter().zip(expect.iter()) {
            assert!((k - e).abs() < 1e-9, "kink {k} vs {e}");
        }
    }

    #[test]
    fn recursion_rejects_unphysical_worldlines() {
        assert!(MooreFunction::recursion_from(Trajectory::step(1.0, 0.7).unwrap()).is_err());
        assert!(
            MooreFunction::recursion_from(Trajectory::smoothstep(1.0, 0.3, 0.1).unwrap()).is_err()
        );
    }
}

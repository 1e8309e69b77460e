//! Shortcut-to-adiabaticity trajectory construction.
//!
//! Given a reference trajectory L_ref(t), the WKB phase
//! Phi(z) = integral of dt / L_ref(t) from 0 to z defines a Moore function
//! that solves the field dynamics exactly along a different, derived
//! boundary: the effective trajectory L_eff(t) obtained from
//! Phi(t + L_eff) - Phi(t - L_eff) = 2. Driving the mirror along L_eff
//! reproduces the adiabatic (WKB) field evolution at finite speed, leaving
//! no residual excitation once the wall stops.
//!
//! The reference only needs L_ref > 0; it may be superluminal or even a
//! discontinuous step, and the effective trajectory still comes out
//! subluminal.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, QuadCfg};
use crate::numerics::root::{solve_bracketed, RootCfg};
use crate::trajectory::{DerivSample, Side, SideTag, Trajectory, Worldline};

/// Sub-panels used to cache the cumulative phase across the motion window.
const PHASE_PANELS: usize = 256;

/// Cumulative WKB phase of a reference trajectory, anchored at Phi(0) = 0.
///
/// Piecewise exact on the static plateaus; panel-cached plus a short
/// adaptive tail integral inside the motion window.
#[derive(Clone)]
pub struct WkbPhase {
    reference: Arc<dyn Worldline>,
    /// Panel edges spanning the motion window (includes all junctions).
    edges: Vec<f64>,
    /// Phase at each edge, relative to the window start.
    cum: Vec<f64>,
    window: (f64, f64),
    l_in: f64,
    l_out: f64,
    /// Phase at the window start so that Phi(0) = 0.
    offset: f64,
}

impl WkbPhase {
    pub fn new(reference: Arc<dyn Worldline>) -> Result<Self> {
        let (lo, hi) = reference.length_bounds();
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::InvalidTrajectory(format!(
                "reference length must stay positive and finite, bounds are ({lo}, {hi})"
            )));
        }
        let window = reference.motion_window();
        let (a, b) = window;
        let mut edges: Vec<f64> = if b > a {
            (0..=PHASE_PANELS).map(|i| a + (b - a) * i as f64 / PHASE_PANELS as f64).collect()
        } else {
            vec![a]
        };
        for j in reference.junctions() {
            if j > a && j < b {
                edges.push(j);
            }
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let cfg = QuadCfg::with_abs_tol(1e-14);
        let mut cum = Vec::with_capacity(edges.len());
        cum.push(0.0);
        for w in edges.windows(2) {
            let inc = integrate(|z| 1.0 / reference.length(z), w[0], w[1], cfg)?;
            let last = *cum.last().unwrap();
            cum.push(last + inc);
        }
        let mut phase = Self {
            reference,
            edges,
            cum,
            window,
            l_in: 0.0,
            l_out: 0.0,
            offset: 0.0,
        };
        phase.l_in = phase.reference.in_length();
        phase.l_out = phase.reference.out_length();
        phase.offset = 0.0;
        let raw_at_zero = phase.raw(0.0)?;
        phase.offset = -raw_at_zero;
        Ok(phase)
    }

    pub fn reference(&self) -> &Arc<dyn Worldline> {
        &self.reference
    }

    /// Phase relative to the window start.
    fn raw(&self, z: f64) -> Result<f64> {
        let (a, b) = self.window;
        if z <= a {
            return Ok((z - a) / self.l_in);
        }
        if z >= b {
            return Ok(self.cum.last().unwrap() + (z - b) / self.l_out);
        }
        let i = match self.edges.binary_search_by(|e| e.total_cmp(&z)) {
            Ok(i) => return Ok(self.cum[i]),
            Err(i) => i - 1,
        };
        let tail = integrate(
            |u| 1.0 / self.reference.length(u),
            self.edges[i],
            z,
            QuadCfg::with_abs_tol(1e-14),
        )?;
        Ok(self.cum[i] + tail)
    }

    /// Phi(z), anchored so that Phi(0) = 0.
    pub fn phi(&self, z: f64) -> Result<f64> {
        Ok(self.raw(z)? + self.offset)
    }

    /// (Phi', Phi'', Phi''') at `z`; right-sided at reference junctions.
    pub fn phi_derivs(&self, z: f64) -> Result<(f64, f64, f64)> {
        self.phi_derivs_sided(z, Side::Right)
    }

    pub fn phi_derivs_sided(&self, z: f64, side: Side) -> Result<(f64, f64, f64)> {
        let d = self.reference.derivs_sided(z, side)?;
        let l = d.length;
        let d1 = 1.0 / l;
        let d2 = -d.speed / (l * l);
        let d3 = (2.0 * d.speed * d.speed - l * d.accel) / (l * l * l);
        Ok((d1, d2, d3))
    }

    /// Solve Phi(t + l) - Phi(t - l) = 2 for the effective half-width l(t).
    ///
    /// The bracket [min L (1 - 1e-6), max L (1 + 1e-6)] is always valid:
    /// the phase increment over a span 2l lies between 2l / max L and
    /// 2l / min L.
    pub fn boundary(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.reference.length_bounds();
        if hi - lo <= f64::EPSILON * hi {
            return Ok(lo);
        }
        let g = |l: f64| match (self.phi(t + l), self.phi(t - l)) {
            (Ok(p), Ok(m)) => p - m - 2.0,
            _ => f64::NAN,
        };
        solve_bracketed(
            g,
            lo * (1.0 - 1e-6),
            hi * (1.0 + 1e-6),
            RootCfg::with_tol(1e-13 * hi.max(1.0)),
        )
    }
}

/// The boundary along which the WKB Moore function is exact.
///
/// Static with the reference's in-length before `t_start_ref - L_in`,
/// static with the out-length after `t_end_ref + L_out`, and strictly
/// subluminal in between regardless of how violent the reference is.
#[derive(Clone)]
pub struct EffectiveTrajectory {
    phase: WkbPhase,
    window: (f64, f64),
    l_in: f64,
    l_out: f64,
    junction_images: Vec<f64>,
}

impl EffectiveTrajectory {
    pub fn new(reference: Arc<dyn Worldline>) -> Result<Self> {
        let phase = WkbPhase::new(reference)?;
        Self::from_phase(phase)
    }

    pub fn from_trajectory(reference: Trajectory) -> Result<Self> {
        Self::new(Arc::new(reference))
    }

    pub fn from_phase(phase: WkbPhase) -> Result<Self> {
        let reference = phase.reference().clone();
        let (a, b) = reference.motion_window();
        let l_in = reference.in_length();
        let l_out = reference.out_length();
        let window = (a - l_in, b + l_out);
        let (blo, bhi) = reference.length_bounds();
        let cfg = RootCfg::with_tol(1e-13 * (1.0 + bhi));
        let mut junction_images = Vec::new();
        for j in reference.junctions() {
            // forward image: t + l(t) = j, monotone since |l'| < 1
            let fwd = solve_bracketed(
                |t| match phase.boundary(t) {
                    Ok(l) => t + l - j,
                    Err(_) => f64::NAN,
                },
                j - bhi * (1.0 + 1e-6) - 1e-9,
                j - blo * (1.0 - 1e-6) + 1e-9,
                cfg,
            )?;
            // backward image: t - l(t) = j
            let bwd = solve_bracketed(
                |t| match phase.boundary(t) {
                    Ok(l) => t - l - j,
                    Err(_) => f64::NAN,
                },
                j + blo * (1.0 - 1e-6) - 1e-9,
                j + bhi * (1.0 + 1e-6) + 1e-9,
                cfg,
            )?;
            junction_images.push(fwd);
            junction_images.push(bwd);
        }
        junction_images.push(window.0);
        junction_images.push(window.1);
        junction_images.sort_by(f64::total_cmp);
        junction_images.dedup();
        Ok(Self { phase, window, l_in, l_out, junction_images })
    }

    pub fn phase(&self) -> &WkbPhase {
        &self.phase
    }

    pub fn reference(&self) -> &Arc<dyn Worldline> {
        self.phase.reference()
    }

    fn len_at(&self, t: f64) -> Result<f64> {
        if t <= self.window.0 {
            return Ok(self.l_in);
        }
        if t >= self.window.1 {
            return Ok(self.l_out);
        }
        self.phase.boundary(t)
    }

    fn sided(&self, t: f64, side: Side) -> Result<DerivSample> {
        let at_junction = self.junction_images.contains(&t);
        let tag = if at_junction {
            match side {
                Side::Left => SideTag::Left,
                Side::Right => SideTag::Right,
            }
        } else {
            SideTag::TwoSided
        };
        let before = t < self.window.0 || (t == self.window.0 && side == Side::Left);
        let after = t > self.window.1 || (t == self.window.1 && side == Side::Right);
        if before {
            return Ok(DerivSample { length: self.l_in, speed: 0.0, accel: 0.0, side: tag });
        }
        if after {
            return Ok(DerivSample { length: self.l_out, speed: 0.0, accel: 0.0, side: tag });
        }
        let l = self.phase.boundary(t)?;
        let reference = self.phase.reference();
        let da = reference.derivs_sided(t - l, side)?;
        let db = reference.derivs_sided(t + l, side)?;
        let (a, b) = (da.length, db.length);
        let speed = (b - a) / (a + b);
        let ap = da.speed * (1.0 - speed);
        let bp = db.speed * (1.0 + speed);
        let accel = 2.0 * (a * bp - b * ap) / ((a + b) * (a + b));
        Ok(DerivSample { length: l, speed, accel, side: tag })
    }
}

impl Worldline for EffectiveTrajectory {
    fn length(&self, t: f64) -> f64 {
        // the bracket is valid for every t, so failure here means the
        // reference itself broke its bounds
        self.len_at(t).expect("effective length solve cannot lose its bracket")
    }

    fn derivs(&self, t: f64) -> Result<DerivSample> {
        self.sided(t, Side::Right)
    }

    fn derivs_sided(&self, t: f64, side: Side) -> Result<DerivSample> {
        self.sided(t, side)
    }

    fn third_deriv(&self, t: f64) -> Result<f64> {
        if t <= self.window.0 || t >= self.window.1 {
            return Ok(0.0);
        }
        let side = Side::Right;
        let l = self.phase.boundary(t)?;
        let reference = self.phase.reference();
        let da = reference.derivs_sided(t - l, side)?;
        let db = reference.derivs_sided(t + l, side)?;
        let (a, b) = (da.length, db.length);
        let lp = (b - a) / (a + b);
        let ap = da.speed * (1.0 - lp);
        let bp = db.speed * (1.0 + lp);
        let s = a + b;
        let lpp = 2.0 * (a * bp - b * ap) / (s * s);
        let app = da.accel * (1.0 - lp) * (1.0 - lp) - da.speed * lpp;
        let bpp = db.accel * (1.0 + lp) * (1.0 + lp) + db.speed * lpp;
        Ok(2.0 * ((a * bpp - b * app) * s - 2.0 * (a * bp - b * ap) * (ap + bp)) / (s * s * s))
    }

    fn motion_window(&self) -> (f64, f64) {
        self.window
    }

    fn in_length(&self) -> f64 {
        self.l_in
    }

    fn out_length(&self) -> f64 {
        self.l_out
    }

    fn length_bounds(&self) -> (f64, f64) {
        // the effective length is a phase average of the reference length,
        // so the reference bounds contain it
        self.phase.reference().length_bounds()
    }

    fn junctions(&self) -> Vec<f64> {
        self.junction_images.clone()
    }
}

/// Closed form of the effective trajectory for a step reference
/// L0 -> L1 at `t_jump`: a constant-velocity ramp over
/// [t_jump - L0, t_jump + L1] with |speed| = |L0 - L1| / (L0 + L1).
pub fn effective_trajectory_step(l0: f64, l1: f64, t_jump: f64) -> Result<Trajectory> {
    if (l0 - l1).abs() < f64::EPSILON * l0.abs().max(l1.abs()) {
        return Trajectory::static_cavity(l0);
    }
    Trajectory::linear_segment(l0, l1, t_jump - l0, t_jump + l1)
}

/// Effective frequency entering the WKB error analysis:
/// Omega^2 = w^2 + w''/(2w) - (3/4)(w'/w)^2 for a mode frequency w(t).
#[derive(Debug, Clone, Copy)]
pub struct EffectiveFrequency {
    pub omega_sq: f64,
    /// False when Omega^2 < 0, where the WKB form turns evanescent.
    pub real: bool,
}

impl EffectiveFrequency {
    /// sqrt(Omega^2) when real.
    pub fn omega(&self) -> Option<f64> {
        self.real.then(|| self.omega_sq.sqrt())
    }
}

/// `omega` returns (w, w', w'') at a given time.
pub fn effective_frequency(
    omega: &dyn Fn(f64) -> (f64, f64, f64),
    t: f64,
) -> Result<EffectiveFrequency> {
    let (w, w1, w2) = omega(t);
    if !(w.is_finite() && w1.is_finite() && w2.is_finite()) || w == 0.0 {
        return Err(Error::Domain(format!("frequency data at t = {t} is unusable: ({w}, {w1}, {w2})")));
    }
    let r = w1 / w;
    let omega_sq = w * w + 0.5 * w2 / w - 0.75 * r * r;
    Ok(EffectiveFrequency { omega_sq, real: omega_sq >= 0.0 })
}

/// (w, w', w'') for cavity mode `n`: w_n(t) = n pi / L(t).
pub fn cavity_mode_frequency(w: &dyn Worldline, n: usize, t: f64) -> Result<(f64, f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("mode index must be at least 1".into()));
    }
    let d = w.derivs(t)?;
    let npi = n as f64 * std::f64::consts::PI;
    let l = d.length;
    let w0 = npi / l;
    let w1 = -npi * d.speed / (l * l);
    let w2 = -npi * (d.accel * l - 2.0 * d.speed * d.speed) / (l * l * l);
    Ok((w0, w1, w2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::validate;

    fn smoothstep_ref() -> Arc<dyn Worldline> {
        Arc::new(Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap())
    }

    #[test]
    fn phase_is_exact_on_plateaus() {
        let phase = WkbPhase::new(smoothstep_ref()).unwrap();
        assert!(phase.phi(0.0).unwrap().abs() < 1e-15);
        // in plateau: Phi(z) = z / L0
        assert!((phase.phi(-2.0).unwrap() + 2.0).abs() < 1e-13);
        // out plateau advances at 1 / L1
        let p5 = phase.phi(5.0).unwrap();
        let p7 = phase.phi(7.0).unwrap();
        assert!((p7 - p5 - 2.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn phase_matches_simpson_oracle_inside_the_window() {
        // composite Simpson with 2^20 intervals over [0, 0.8]
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        let n = 1 << 20;
        let (a, b) = (0.0, 0.8);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x0 = a + i as f64 * h;
            acc += h / 6.0
                * (1.0 / tr.length(x0)
                    + 4.0 / tr.length(x0 + 0.5 * h)
                    + 1.0 / tr.length(x0 + h));
        }
        let phase = WkbPhase::new(Arc::new(tr)).unwrap();
        assert!(
            (phase.phi(0.8).unwrap() - acc).abs() < 1e-12,
            "phase {} vs oracle {}",
            phase.phi(0.8).unwrap(),
            acc
        );
    }

    #[test]
    fn phase_derivatives_match_reference() {
        let phase = WkbPhase::new(smoothstep_ref()).unwrap();
        let tr = phase.reference();
        for &z in &[0.2, 0.5, 0.9] {
            let (d1, d2, d3) = phase.phi_derivs(z).unwrap();
            let l = tr.length(z);
            assert!((d1 - 1.0 / l).abs() < 1e-14);
            // finite differences of phi
            let h = 1e-5;
            let fd1 = (phase.phi(z + h).unwrap() - phase.phi(z - h).unwrap()) / (2.0 * h);
            assert!(((d1 - fd1) / d1).abs() < 1e-8);
            let fd2 = (phase.phi(z + h).unwrap() - 2.0 * phase.phi(z).unwrap()
                + phase.phi(z - h).unwrap())
                / (h * h);
            assert!(((d2 - fd2) / (1.0 + d2.abs())).abs() < 1e-5);
            let g = 1e-4;
            let fd3 = (phase.phi_derivs(z + g).unwrap().1 - phase.phi_derivs(z - g).unwrap().1)
                / (2.0 * g);
            assert!(((d3 - fd3) / (1.0 + d3.abs())).abs() < 1e-5);
        }
    }

    #[test]
    fn boundary_solve_satisfies_the_phase_equation() {
        let phase = WkbPhase::new(smoothstep_ref()).unwrap();
        for &t in &[-1.5, -0.4, 0.0, 0.3, 0.61, 1.2, 2.0, 4.0] {
            let l = phase.boundary(t).unwrap();
            let gap = phase.phi(t + l).unwrap() - phase.phi(t - l).unwrap();
            assert!((gap - 2.0).abs() < 1e-11, "t={t}: gap {gap}");
            assert!(l > 0.69 && l < 1.01);
        }
    }

    #[test]
    fn boundary_matches_bisection_simpson_oracle() {
        // independent check at t = 0.5: bisect on a Simpson-rule phase
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        let simpson = |a: f64, b: f64| {
            let n = 20_000;
            let h = (b - a) / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let x0 = a + i as f64 * h;
                acc += h / 6.0
                    * (1.0 / tr.length(x0)
                        + 4.0 / tr.length(x0 + 0.5 * h)
                        + 1.0 / tr.length(x0 + h));
            }
            acc
        };
        let t = 0.5;
        let (mut lo, mut hi) = (0.5, 1.1);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if simpson(t - mid, t + mid) < 2.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let phase = WkbPhase::new(Arc::new(tr)).unwrap();
        let l = phase.boundary(t).unwrap();
        assert!((l - oracle).abs() < 1e-10, "boundary {l} vs oracle {oracle}");
    }

    #[test]
    fn effective_trajectory_has_exact_plateaus_and_is_physical() {
        let eff = EffectiveTrajectory::new(smoothstep_ref()).unwrap();
        assert_eq!(eff.length(-1.0 - 1e-9), 1.0);
        assert_eq!(eff.length(-5.0), 1.0);
        // out plateau starts at t_end + L1 = 1.7
        assert_eq!(eff.length(1.7), 0.7);
        assert_eq!(eff.length(9.0), 0.7);
        let report = validate(&eff);
        assert!(report.physical, "report: {report:?}");
        assert!(report.max_speed < 0.2, "speed {}", report.max_speed);
    }

    #[test]
    fn effective_trajectory_of_superluminal_reference_is_subluminal() {
        // raw max speed 0.3 * 1.875 / 0.1 = 5.625
        let fast = Trajectory::smoothstep(1.0, 0.3, 0.1).unwrap();
        assert!(!fast.validate().physical);
        let eff = EffectiveTrajectory::from_trajectory(fast).unwrap();
        let report = validate(&eff);
        assert!(report.physical, "report: {report:?}");
        assert!(report.max_speed < 1.0);
    }

    #[test]
    fn effective_of_step_matches_closed_form() {
        let step = Trajectory::step(1.0, 0.7).unwrap();
        let eff = EffectiveTrajectory::from_trajectory(step).unwrap();
        let closed = effective_trajectory_step(1.0, 0.7, 0.0).unwrap();
        for i in 0..=1000 {
            let t = -1.5 + 3.0 * i as f64 / 1000.0;
            let diff = (eff.length(t) - closed.length(t)).abs();
            assert!(diff < 1e-10, "t={t}: {} vs {}", eff.length(t), closed.length(t));
        }
        // mid-ramp value from the closed form: (2 L0 L1 - t (L0 - L1)) / (L0 + L1)
        assert!((closed.length(0.0) - 1.4 / 1.7).abs() < 1e-15);
        assert!((closed.length(0.7) - 0.7).abs() < 1e-15);
        let report = validate(&closed);
        assert!(report.physical);
        assert!((report.max_speed - 0.3 / 1.7).abs() < 1e-12);
    }

    #[test]
    fn effective_derivatives_match_finite_differences() {
        let eff = EffectiveTrajectory::new(smoothstep_ref()).unwrap();
        let h = 1e-5;
        for &t in &[-0.7, -0.2, 0.3, 0.8, 1.3] {
            let d = eff.derivs(t).unwrap();
            let fd1 = (eff.length(t + h) - eff.length(t - h)) / (2.0 * h);
            assert!(
                ((d.speed - fd1) / (1.0 + d.speed.abs())).abs() < 1e-7,
                "t={t}: {} vs {}",
                d.speed,
                fd1
            );
            let fd2 = (eff.derivs(t + h).unwrap().speed - eff.derivs(t - h).unwrap().speed)
                / (2.0 * h);
            assert!(((d.accel - fd2) / (1.0 + d.accel.abs())).abs() < 1e-6);
            let fd3 = (eff.derivs(t + h).unwrap().accel - eff.derivs(t - h).unwrap().accel)
                / (2.0 * h);
            let d3 = eff.third_deriv(t).unwrap();
            assert!(((d3 - fd3) / (1.0 + d3.abs())).abs() < 1e-4, "t={t}: {d3} vs {fd3}");
        }
    }

    #[test]
    fn step_phase_is_piecewise_linear() {
        let phase = WkbPhase::new(Arc::new(Trajectory::step(1.0, 0.7).unwrap())).unwrap();
        assert!((phase.phi(-3.0).unwrap() + 3.0).abs() < 1e-13);
        assert!((phase.phi(0.7).unwrap() - 1.0).abs() < 1e-13);
        assert!((phase.phi(1.4).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn effective_frequency_of_exponential_sweep() {
        // w = e^{a t} gives Omega^2 = w^2 - a^2 / 4 exactly
        let a = 0.8_f64;
        let omega = move |t: f64| {
            let w = (a * t).exp();
            (w, a * w, a * a * w)
        };
        for &t in &[-1.0, 0.0, 0.5, 2.0] {
            let eff = effective_frequency(&omega, t).unwrap();
            let expect = (2.0 * a * t).exp() - a * a / 4.0;
            assert!(((eff.omega_sq - expect) / (1.0 + expect.abs())).abs() < 1e-13);
        }
        // strongly swept low frequency goes evanescent
        let eff = effective_frequency(&omega, -3.0).unwrap();
        assert!(!eff.real);
        assert!(eff.omega().is_none());
    }

    #[test]
    fn static_frequency_is_unchanged() {
        let omega = |_: f64| (3.1, 0.0, 0.0);
        let eff = effective_frequency(&omega, 0.0).unwrap();
        assert!((eff.omega_sq - 3.1 * 3.1).abs() < 1e-14);
        assert!(eff.real);
    }

    #[test]
    fn cavity_mode_frequency_matches_finite_differences() {
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        let h = 1e-5;
        for &t in &[0.2, 0.5, 0.8] {
            let (w, w1, w2) = cavity_mode_frequency(&tr, 2, t).unwrap();
            assert!((w - 2.0 * std::f64::consts::PI / tr.length(t)).abs() < 1e-13);
            let wp = cavity_mode_frequency(&tr, 2, t + h).unwrap().0;
            let wm = cavity_mode_frequency(&tr, 2, t - h).unwrap().0;
            assert!(((w1 - (wp - wm) / (2.0 * h)) / (1.0 + w1.abs())).abs() < 1e-6);
            let fd2 = (wp - 2.0 * w + wm) / (h * h);
            assert!(((w2 - fd2) / (1.0 + w2.abs())).abs() < 1e-4);
        }
    }
}

//! Mirror trajectories L(t) for a cavity with one fixed wall at x = 0 and a
//! moving wall at x = L(t), in natural units (c = hbar = kB = 1).
//!
//! Every trajectory is static outside a finite motion window: L = L_in for
//! t <= t_start and L = L_out for t >= t_end. Physical trajectories keep
//! L > 0 and |dL/dt| < 1; the idealized `step` kind violates the speed bound
//! by construction and is admitted only where a closed form consumes it.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::spline::CubicSpline;

/// Which one-sided limit to take at a junction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// How a derivative sample at `t` relates to the junction structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideTag {
    /// Interior point, both one-sided limits agree.
    TwoSided,
    /// One-sided limit from below at a junction.
    Left,
    /// One-sided limit from above at a junction.
    Right,
}

/// Length and its first two time derivatives at a point.
#[derive(Debug, Clone, Copy)]
pub struct DerivSample {
    pub length: f64,
    pub speed: f64,
    pub accel: f64,
    pub side: SideTag,
}

/// Worldline of the moving wall. Implemented by [`Trajectory`] and by the
/// solver-produced effective trajectory, so downstream machinery (Moore
/// recursion, quadrature) is agnostic about where L(t) comes from.
pub trait Worldline: Send + Sync {
    /// L(t); total in t, right-continuous at jumps.
    fn length(&self, t: f64) -> f64;

    /// (L, L', L'') at `t`; one-sided (right) at junctions.
    /// Errors with [`Error::Discontinuity`] exactly at a jump point.
    fn derivs(&self, t: f64) -> Result<DerivSample>;

    /// Explicit one-sided limit of (L, L', L'') at `t`.
    fn derivs_sided(&self, t: f64, side: Side) -> Result<DerivSample>;

    /// L''' at `t`, same side convention as [`Worldline::derivs`].
    fn third_deriv(&self, t: f64) -> Result<f64>;

    /// (t_start, t_end) outside of which the wall is static.
    fn motion_window(&self) -> (f64, f64);

    /// Static length before the motion window.
    fn in_length(&self) -> f64;

    /// Static length after the motion window.
    fn out_length(&self) -> f64;

    /// Conservative global (min L, max L) over all times.
    fn length_bounds(&self) -> (f64, f64);

    /// Times where smoothness may drop (junctions, knots, jumps).
    fn junctions(&self) -> Vec<f64>;
}

/// The quintic smoothstep delta(u) = 10u^3 - 15u^4 + 6u^5 and derivatives
/// in units of u; monotone on [0, 1] with delta' = 30 u^2 (1-u)^2.
fn quintic(u: f64) -> (f64, f64, f64, f64) {
    let d0 = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    let w = u * (1.0 - u);
    let d1 = 30.0 * w * w;
    let d2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    let d3 = 60.0 * (1.0 - 6.0 * u + 6.0 * u * u);
    (d0, d1, d2, d3)
}

/// Peak of delta' over [0, 1], attained at u = 1/2.
pub const QUINTIC_PEAK_SLOPE: f64 = 15.0 / 8.0;

#[derive(Debug, Clone)]
pub enum Trajectory {
    /// L(t) = L0 for all t.
    Static { l0: f64 },
    /// Quintic ramp from `l_from` to `l_to` over [t_start, t_start + tau]; C^2 everywhere.
    Smoothstep { l_from: f64, l_to: f64, t_start: f64, tau: f64 },
    /// Instantaneous jump at `t_jump`; right-continuous, non-physical.
    Step { l0: f64, l1: f64, t_jump: f64 },
    /// Constant-velocity ramp; C^0 at the endpoints.
    LinearSegment { l0: f64, l1: f64, t_start: f64, t_end: f64 },
    /// Natural cubic spline through (t, L) samples, static outside the knots.
    Sampled { spline: CubicSpline },
    /// Ordered sequence of pieces with disjoint motion windows.
    Composite { pieces: Vec<Trajectory>, switches: Vec<f64> },
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTrajectory(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Trajectory {
    pub fn static_cavity(l0: f64) -> Result<Self> {
        require_positive("L0", l0)?;
        Ok(Self::Static { l0 })
    }

    /// Ramp family L(t) = L0 (1 - eps * delta(t / tau)) with eps in (0, 1).
    pub fn smoothstep(l0: f64, eps: f64, tau: f64) -> Result<Self> {
        Self::smoothstep_at(l0, eps, tau, 0.0)
    }

    pub fn smoothstep_at(l0: f64, eps: f64, tau: f64, t_start: f64) -> Result<Self> {
        require_positive("L0", l0)?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidTrajectory(format!("eps must lie in (0, 1), got {eps}")));
        }
        Self::smoothstep_between(l0, l0 * (1.0 - eps), t_start, tau)
    }

    /// General quintic ramp between two positive lengths (either direction).
    pub fn smoothstep_between(l_from: f64, l_to: f64, t_start: f64, tau: f64) -> Result<Self> {
        require_positive("L_from", l_from)?;
        require_positive("L_to", l_to)?;
        require_positive("tau", tau)?;
        if !t_start.is_finite() {
            return Err(Error::InvalidTrajectory("t_start must be finite".into()));
        }
        Ok(Self::Smoothstep { l_from, l_to, t_start, tau })
    }

    pub fn step(l0: f64, l1: f64) -> Result<Self> {
        Self::step_at(l0, l1, 0.0)
    }

    pub fn step_at(l0: f64, l1: f64, t_jump: f64) -> Result<Self> {
        require_positive("L0", l0)?;
        require_positive("L1", l1)?;
        Ok(Self::Step { l0, l1, t_jump })
    }

    pub fn linear_segment(l0: f64, l1: f64, t_start: f64, t_end: f64) -> Result<Self> {
        require_positive("L0", l0)?;
        require_positive("L1", l1)?;
        if !(t_end > t_start) {
            return Err(Error::InvalidTrajectory(format!(
                "linear segment needs t_end > t_start, got [{t_start}, {t_end}]"
            )));
        }
        Ok(Self::LinearSegment { l0, l1, t_start, t_end })
    }

    pub fn sampled(ts: Vec<f64>, ls: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::natural(ts, ls)?;
        let (lo, _) = spline.min_max();
        if !(lo > 0.0) {
            return Err(Error::InvalidTrajectory(format!(
                "sampled trajectory dips to L = {lo}; lengths must stay positive"
            )));
        }
        Ok(Self::Sampled { spline })
    }

    pub fn composite(pieces: Vec<Trajectory>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidTrajectory("composite needs at least one piece".into()));
        }
        let mut switches = Vec::with_capacity(pieces.len().saturating_sub(1));
        for pair in pieces.windows(2) {
            let (_, end_a) = pair[0].motion_window();
            let (start_b, _) = pair[1].motion_window();
            if !(end_a <= start_b) {
                return Err(Error::InvalidTrajectory(format!(
                    "composite pieces overlap: window ending {end_a} precedes start {start_b}"
                )));
            }
            switches.push(0.5 * (end_a + start_b));
        }
        Ok(Self::Composite { pieces, switches })
    }

    /// Parse the JSON trajectory format (see [`TrajectorySpec`]).
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: TrajectorySpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidTrajectory(format!("bad trajectory spec: {e}")))?;
        spec.build()
    }

    fn composite_index(switches: &[f64], t: f64, side: Side) -> usize {
        let mut i = 0;
        for &s in switches {
            let after = match side {
                Side::Left => t > s,
                Side::Right => t >= s,
            };
            if after {
                i += 1;
            } else {
                break;
            }
        }
        i
    }

    fn sample(&self, t: f64, side: Side) -> DerivSample {
        let tagged = |length: f64, speed: f64, accel: f64, at_junction: bool| DerivSample {
            length,
            speed,
            accel,
            side: if at_junction {
                match side {
                    Side::Left => SideTag::Left,
                    Side::Right => SideTag::Right,
                }
            } else {
                SideTag::TwoSided
            },
        };
        match self {
            Self::Static { l0 } => tagged(*l0, 0.0, 0.0, false),
            Self::Smoothstep { l_from, l_to, t_start, tau } => {
                let t_end = t_start + tau;
                let inside = (t > *t_start && t < t_end)
                    || (t == *t_start && side == Side::Right)
                    || (t == t_end && side == Side::Left);
                if inside {
                    let u = (t - t_start) / tau;
                    let (d0, d1, d2, _) = quintic(u);
                    let amp = l_to - l_from;
                    tagged(
                        l_from + amp * d0,
                        amp * d1 / tau,
                        amp * d2 / (tau * tau),
                        t == *t_start || t == t_end,
                    )
                } else if t <= *t_start {
                    tagged(*l_from, 0.0, 0.0, t == *t_start)
                } else {
                    tagged(*l_to, 0.0, 0.0, t == t_end)
                }
            }
            Self::Step { l0, l1, t_jump } => {
                let before = t < *t_jump || (t == *t_jump && side == Side::Left);
                tagged(if before { *l0 } else { *l1 }, 0.0, 0.0, t == *t_jump)
            }
            Self::LinearSegment { l0, l1, t_start, t_end } => {
                let inside = (t > *t_start && t < *t_end)
                    || (t == *t_start && side == Side::Right)
                    || (t == *t_end && side == Side::Left);
                if inside {
                    let slope = (l1 - l0) / (t_end - t_start);
                    tagged(
                        l0 + slope * (t - t_start),
                        slope,
                        0.0,
                        t == *t_start || t == *t_end,
                    )
                } else if t <= *t_start {
                    tagged(*l0, 0.0, 0.0, t == *t_start)
                } else {
                    tagged(*l1, 0.0, 0.0, t == *t_end)
                }
            }
            Self::Sampled { spline } => {
                let (a, b) = (spline.t_first(), spline.t_last());
                let inside = (t > a && t < b)
                    || (t == a && side == Side::Right)
                    || (t == b && side == Side::Left);
                if inside {
                    tagged(spline.eval(t), spline.deriv1(t), spline.deriv2(t), t == a || t == b)
                } else if t <= a {
                    tagged(spline.y_first(), 0.0, 0.0, t == a)
                } else {
                    tagged(spline.y_last(), 0.0, 0.0, t == b)
                }
            }
            Self::Composite { pieces, switches } => {
                let i = Self::composite_index(switches, t, side);
                let mut s = pieces[i].sample(t, side);
                if switches.contains(&t) {
                    s.side = match side {
                        Side::Left => SideTag::Left,
                        Side::Right => SideTag::Right,
                    };
                }
                s
            }
        }
    }

    fn third_sided(&self, t: f64, side: Side) -> f64 {
        match self {
            Self::Static { .. } | Self::Step { .. } => 0.0,
            Self::Smoothstep { l_from, l_to, t_start, tau } => {
                let t_end = t_start + tau;
                let inside = (t > *t_start && t < t_end)
                    || (t == *t_start && side == Side::Right)
                    || (t == t_end && side == Side::Left);
                if inside {
                    let u = (t - t_start) / tau;
                    let (_, _, _, d3) = quintic(u);
                    (l_to - l_from) * d3 / (tau * tau * tau)
                } else {
                    0.0
                }
            }
            Self::LinearSegment { .. } => 0.0,
            Self::Sampled { spline } => {
                let (a, b) = (spline.t_first(), spline.t_last());
                let inside = (t > a && t < b)
                    || (t == a && side == Side::Right)
                    || (t == b && side == Side::Left);
                if inside {
                    spline.deriv3(t)
                } else {
                    0.0
                }
            }
            Self::Composite { pieces, switches } => {
                let i = Self::composite_index(switches, t, side);
                pieces[i].third_sided(t, side)
            }
        }
    }

    /// Relative ramp amplitude 1 - L_out / L_in, when the shape has one.
    pub fn eps(&self) -> Option<f64> {
        match self {
            Self::Smoothstep { l_from, l_to, .. } => Some(1.0 - l_to / l_from),
            Self::Step { l0, l1, .. } => Some(1.0 - l1 / l0),
            _ => None,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

impl Worldline for Trajectory {
    fn length(&self, t: f64) -> f64 {
        self.sample(t, Side::Right).length
    }

    fn derivs(&self, t: f64) -> Result<DerivSample> {
        if let Self::Step { t_jump, .. } = self {
            if t == *t_jump {
                return Err(Error::Discontinuity { t });
            }
        }
        Ok(self.sample(t, Side::Right))
    }

    fn derivs_sided(&self, t: f64, side: Side) -> Result<DerivSample> {
        Ok(self.sample(t, side))
    }

    fn third_deriv(&self, t: f64) -> Result<f64> {
        if let Self::Step { t_jump, .. } = self {
            if t == *t_jump {
                return Err(Error::Discontinuity { t });
            }
        }
        Ok(self.third_sided(t, Side::Right))
    }

    fn motion_window(&self) -> (f64, f64) {
        match self {
            Self::Static { .. } => (0.0, 0.0),
            Self::Smoothstep { t_start, tau, .. } => (*t_start, t_start + tau),
            Self::Step { t_jump, .. } => (*t_jump, *t_jump),
            Self::LinearSegment { t_start, t_end, .. } => (*t_start, *t_end),
            Self::Sampled { spline } => (spline.t_first(), spline.t_last()),
            Self::Composite { pieces, .. } => {
                (pieces[0].motion_window().0, pieces.last().unwrap().motion_window().1)
            }
        }
    }

    fn in_length(&self) -> f64 {
        match self {
            Self::Static { l0 } => *l0,
            Self::Smoothstep { l_from, .. } => *l_from,
            Self::Step { l0, .. } => *l0,
            Self::LinearSegment { l0, .. } => *l0,
            Self::Sampled { spline } => spline.y_first(),
            Self::Composite { pieces, .. } => pieces[0].in_length(),
        }
    }

    fn out_length(&self) -> f64 {
        match self {
            Self::Static { l0 } => *l0,
            Self::Smoothstep { l_to, .. } => *l_to,
            Self::Step { l1, .. } => *l1,
            Self::LinearSegment { l1, .. } => *l1,
            Self::Sampled { spline } => spline.y_last(),
            Self::Composite { pieces, .. } => pieces.last().unwrap().out_length(),
        }
    }

    fn length_bounds(&self) -> (f64, f64) {
        match self {
            Self::Static { l0 } => (*l0, *l0),
            // the quintic is monotone, so the endpoints bound the ramp
            Self::Smoothstep { l_from, l_to, .. } => (l_from.min(*l_to), l_from.max(*l_to)),
            Self::Step { l0, l1, .. } => (l0.min(*l1), l0.max(*l1)),
            Self::LinearSegment { l0, l1, .. } => (l0.min(*l1), l0.max(*l1)),
            Self::Sampled { spline } => spline.min_max(),
            Self::Composite { pieces, .. } => pieces.iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), p| {
                    let (a, b) = p.length_bounds();
                    (lo.min(a), hi.max(b))
                },
            ),
        }
    }

    fn junctions(&self) -> Vec<f64> {
        let mut js = match self {
            Self::Static { .. } => vec![],
            Self::Smoothstep { t_start, tau, .. } => vec![*t_start, t_start + tau],
            Self::Step { t_jump, .. } => vec![*t_jump],
            Self::LinearSegment { t_start, t_end, .. } => vec![*t_start, *t_end],
            Self::Sampled { spline } => spline.knots().to_vec(),
            Self::Composite { pieces, switches } => {
                let mut v: Vec<f64> = pieces.iter().flat_map(|p| p.junctions()).collect();
                v.extend_from_slice(switches);
                v
            }
        };
        js.sort_by(f64::total_cmp);
        js.dedup();
        js
    }
}

/// Junction smoothness achieved by a trajectory (C2 means at least C^2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Continuity {
    Discontinuous,
    C0,
    C1,
    C2,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    /// Smallest length seen on the scan grid and at junction sides.
    pub min_length: f64,
    /// Largest |L'| seen; infinite when the length itself jumps.
    pub max_speed: f64,
    pub continuity: Continuity,
    /// min_length > 0, max_speed < 1, and no length jump.
    pub physical: bool,
}

pub fn validate(w: &dyn Worldline) -> ValidationReport {
    validate_with(w, 4001)
}

/// Scan-based validation: `n` samples across the padded motion window plus
/// exact one-sided checks at every junction.
pub fn validate_with(w: &dyn Worldline, n: usize) -> ValidationReport {
    let (a, b) = w.motion_window();
    let pad = (w.in_length() + w.out_length()).max(0.5 * (b - a)) + 1.0;
    let (lo, hi) = (a - pad, b + pad);
    let n = n.max(3);
    let mut min_length = f64::INFINITY;
    let mut max_speed: f64 = 0.0;
    let mut scan = |s: DerivSample| {
        min_length = min_length.min(s.length);
        max_speed = max_speed.max(s.speed.abs());
    };
    for i in 0..n {
        let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        if let Ok(s) = w.derivs_sided(t, Side::Right) {
            scan(s);
        }
    }
    // exact one-sided limits at junctions decide the continuity class
    let mut continuity = Continuity::C2;
    for j in w.junctions() {
        let (l, r) = match (w.derivs_sided(j, Side::Left), w.derivs_sided(j, Side::Right)) {
            (Ok(l), Ok(r)) => (l, r),
            _ => {
                continuity = Continuity::Discontinuous;
                continue;
            }
        };
        scan(l);
        scan(r);
        let tol = |scale: f64| 1e-9 * (1.0 + scale.abs());
        let class = if (l.length - r.length).abs() > tol(l.length) {
            Continuity::Discontinuous
        } else if (l.speed - r.speed).abs() > tol(l.speed) {
            Continuity::C0
        } else if (l.accel - r.accel).abs() > tol(l.accel) {
            Continuity::C1
        } else {
            Continuity::C2
        };
        continuity = continuity.min(class);
    }
    if continuity == Continuity::Discontinuous {
        max_speed = f64::INFINITY;
    }
    ValidationReport {
        min_length,
        max_speed,
        continuity,
        physical: min_length > 0.0 && max_speed < 1.0,
    }
}

/// On-disk trajectory description.
///
/// ```json
/// {"kind": "smoothstep", "L0": 1.0, "eps": 0.3, "tau": 1.0}
/// {"kind": "step", "L0": 1.0, "L1": 0.7}
/// {"kind": "samples", "t": [0.0, 0.5, 1.0], "L": [1.0, 0.85, 0.7]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectorySpec {
    Static {
        #[serde(rename = "L0")]
        l0: f64,
    },
    Smoothstep {
        #[serde(rename = "L0")]
        l0: f64,
        eps: f64,
        tau: f64,
        #[serde(default)]
        t_start: f64,
    },
    Step {
        #[serde(rename = "L0")]
        l0: f64,
        #[serde(rename = "L1")]
        l1: f64,
        #[serde(default)]
        t_jump: f64,
    },
    LinearSegment {
        #[serde(rename = "L0")]
        l0: f64,
        #[serde(rename = "L1")]
        l1: f64,
        t_start: f64,
        t_end: f64,
    },
    Samples {
        t: Vec<f64>,
        #[serde(rename = "L")]
        l: Vec<f64>,
    },
    Composite {
        pieces: Vec<TrajectorySpec>,
    },
}

impl TrajectorySpec {
    pub fn build(&self) -> Result<Trajectory> {
        match self {
            Self::Static { l0 } => Trajectory::static_cavity(*l0),
            Self::Smoothstep { l0, eps, tau, t_start } => {
                Trajectory::smoothstep_at(*l0, *eps, *tau, *t_start)
            }
            Self::Step { l0, l1, t_jump } => Trajectory::step_at(*l0, *l1, *t_jump),
            Self::LinearSegment { l0, l1, t_start, t_end } => {
                Trajectory::linear_segment(*l0, *l1, *t_start, *t_end)
            }
            Self::Samples { t, l } => Trajectory::sampled(t.clone(), l.clone()),
            Self::Composite { pieces } => {
                let built: Result<Vec<_>> = pieces.iter().map(|p| p.build()).collect();
                Trajectory::composite(built?)
            }
        }
    }
}

/// Convenience for solver constructors that share trajectories.
pub fn arc(traj: Trajectory) -> Arc<dyn Worldline> {
    Arc::new(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quintic_endpoint_conditions() {
        let (d0, d1, d2, _) = quintic(0.0);
        assert_eq!((d0, d1, d2), (0.0, 0.0, 0.0));
        let (d0, d1, d2, _) = quintic(1.0);
        assert!((d0 - 1.0).abs() < 1e-15);
        assert_eq!((d1, d2), (0.0, 0.0));
        // peak slope at the midpoint
        let (_, d1, _, _) = quintic(0.5);
        assert!((d1 - QUINTIC_PEAK_SLOPE).abs() < 1e-15);
    }

    #[test]
    fn smoothstep_midpoint_values() {
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        assert!((tr.length(0.5) - 0.85).abs() < 1e-15);
        let d = tr.derivs(0.5).unwrap();
        assert!((d.speed + 0.5625).abs() < 1e-15);
        assert_eq!(d.side, SideTag::TwoSided);
        // plateaus
        assert_eq!(tr.length(-3.0), 1.0);
        assert_eq!(tr.length(7.0), 0.7);
    }

    #[test]
    fn smoothstep_is_c2_and_subluminal_when_slow() {
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        let report = tr.validate();
        assert!(report.physical);
        assert_eq!(report.continuity, Continuity::C2);
        assert!((report.max_speed - 0.5625).abs() < 1e-3);

        let fast = Trajectory::smoothstep(1.0, 0.3, 0.1).unwrap();
        let report = fast.validate();
        assert!(!report.physical);
        assert!(report.max_speed > 1.0);
        assert_eq!(report.continuity, Continuity::C2);
    }

    #[test]
    fn step_is_right_continuous_and_flagged() {
        let tr = Trajectory::step(1.0, 0.7).unwrap();
        assert_eq!(tr.length(-1e-3), 1.0);
        assert_eq!(tr.length(1e-3), 0.7);
        assert_eq!(tr.length(0.0), 0.7);
        assert!(matches!(tr.derivs(0.0), Err(Error::Discontinuity { .. })));
        let report = tr.validate();
        assert!(!report.physical);
        assert_eq!(report.continuity, Continuity::Discontinuous);
        assert!(report.max_speed.is_infinite());
    }

    #[test]
    fn static_cavity_is_trivially_physical() {
        let tr = Trajectory::static_cavity(2.0).unwrap();
        assert_eq!(tr.length(-17.0), 2.0);
        assert_eq!(tr.length(41.5), 2.0);
        let report = tr.validate();
        assert!(report.physical);
        assert_eq!(report.continuity, Continuity::C2);
        assert_eq!(report.max_speed, 0.0);
    }

    #[test]
    fn derivatives_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trajectories = vec![
            Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap(),
            Trajectory::smoothstep_between(0.7, 1.0, -0.5, 2.0).unwrap(),
            Trajectory::linear_segment(1.0, 0.8, 0.0, 1.0).unwrap(),
        ];
        for tr in &trajectories {
            let (a, b) = tr.motion_window();
            for _ in 0..1000 {
                // interior points away from junctions
                let t = a + (b - a) * rng.gen_range(0.01..0.99);
                let h = 1e-5 * (b - a);
                let d = tr.derivs(t).unwrap();
                let fd1 = (tr.length(t + h) - tr.length(t - h)) / (2.0 * h);
                let fd2 = (tr.length(t + h) - 2.0 * tr.length(t) + tr.length(t - h)) / (h * h);
                let scale1 = 1.0 + d.speed.abs();
                assert!(
                    ((d.speed - fd1) / scale1).abs() < 1e-6,
                    "speed mismatch at t={t}: {} vs {}",
                    d.speed,
                    fd1
                );
                let scale2 = 1.0 + d.accel.abs();
                assert!(((d.accel - fd2) / scale2).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn third_derivative_matches_finite_difference_of_accel() {
        let tr = Trajectory::smoothstep(1.0, 0.25, 0.8).unwrap();
        let h = 1e-6;
        for &t in &[0.1, 0.33, 0.5, 0.71] {
            let d3 = tr.third_deriv(t).unwrap();
            let fd3 =
                (tr.derivs(t + h).unwrap().accel - tr.derivs(t - h).unwrap().accel) / (2.0 * h);
            assert!(((d3 - fd3) / (1.0 + d3.abs())).abs() < 1e-4, "t={t}: {d3} vs {fd3}");
        }
    }

    #[test]
    fn sampled_trajectory_interpolates_and_extends() {
        let ts: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let ls: Vec<f64> = ts.iter().map(|&t| 1.0 - 0.3 * quintic(t).0).collect();
        let tr = Trajectory::sampled(ts, ls).unwrap();
        assert!((tr.length(0.5) - 0.85).abs() < 1e-6);
        assert_eq!(tr.length(-2.0), 1.0);
        assert_eq!(tr.length(5.0), 0.7);
        let report = tr.validate();
        assert!(report.physical);
        assert!(report.min_length > 0.69);
    }

    #[test]
    fn composite_plateau_match_is_c2_and_mismatch_is_flagged() {
        let good = Trajectory::composite(vec![
            Trajectory::smoothstep_between(1.0, 0.7, 0.0, 1.0).unwrap(),
            Trajectory::smoothstep_between(0.7, 1.0, 3.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert_eq!(good.length(2.0), 0.7);
        assert_eq!(good.length(-1.0), 1.0);
        assert_eq!(good.length(5.0), 1.0);
        let report = good.validate();
        assert!(report.physical);
        assert_eq!(report.continuity, Continuity::C2);

        let bad = Trajectory::composite(vec![
            Trajectory::smoothstep_between(1.0, 0.7, 0.0, 1.0).unwrap(),
            Trajectory::smoothstep_between(0.8, 1.0, 3.0, 1.0).unwrap(),
        ])
        .unwrap();
        let report = bad.validate();
        assert!(!report.physical);
        assert_eq!(report.continuity, Continuity::Discontinuous);
    }

    #[test]
    fn composite_rejects_overlap() {
        let r = Trajectory::composite(vec![
            Trajectory::smoothstep_between(1.0, 0.7, 0.0, 2.0).unwrap(),
            Trajectory::smoothstep_between(0.7, 1.0, 1.0, 1.0).unwrap(),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn json_specs_parse() {
        let tr = Trajectory::from_json(r#"{"kind":"smoothstep","L0":1.0,"eps":0.3,"tau":1.0}"#)
            .unwrap();
        assert!((tr.length(0.5) - 0.85).abs() < 1e-15);

        let tr = Trajectory::from_json(r#"{"kind":"step","L0":1.0,"L1":0.7}"#).unwrap();
        assert_eq!(tr.length(1.0), 0.7);

        let tr = Trajectory::from_json(
            r#"{"kind":"samples","t":[0.0,0.5,1.0],"L":[1.0,0.85,0.7]}"#,
        )
        .unwrap();
        assert!((tr.length(0.5) - 0.85).abs() < 1e-12);

        let tr = Trajectory::from_json(r#"{"kind":"static","L0":2.0}"#).unwrap();
        assert_eq!(tr.length(0.3), 2.0);

        assert!(Trajectory::from_json(r#"{"kind":"smoothstep","L0":1.0}"#).is_err());
        assert!(Trajectory::from_json(r#"{"kind":"warp","L0":1.0}"#).is_err());
        assert!(Trajectory::from_json(r#"{"kind":"smoothstep","L0":1.0,"eps":1.4,"tau":1.0}"#)
            .is_err());
    }

    #[test]
    fn junction_sides_are_reported() {
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        let l = tr.derivs_sided(0.0, Side::Left).unwrap();
        let r = tr.derivs_sided(0.0, Side::Right).unwrap();
        assert_eq!(l.side, SideTag::Left);
        assert_eq!(r.side, SideTag::Right);
        // C^2 junction: values agree even though the sides differ
        assert_eq!(l.length, r.length);
        assert_eq!(l.speed, r.speed);
        assert_eq!(l.accel, r.accel);
        // third derivative jumps at the junction
        assert_eq!(tr.third_sided(0.0, Side::Left), 0.0);
        assert!(tr.third_sided(0.0, Side::Right).abs() > 1.0);
    }

    #[test]
    fn eps_roundtrip() {
        let tr = Trajectory::smoothstep(1.0, 0.3, 1.0).unwrap();
        assert!((tr.eps().unwrap() - 0.3).abs() < 1e-15);
    }
}

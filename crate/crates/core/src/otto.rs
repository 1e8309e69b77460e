//! Quantum Otto cycle with the cavity field as working medium.
//!
//! Four strokes: thermalize at (L0, T0), compress L0 -> L1 over a time
//! tau, thermalize at (L1, T1), expand back over tau. Work strokes are
//! unitary, so any nonadiabaticity shows up as quantum friction: extra
//! energy pumped into the field relative to perfect adiabatic following.
//! Compression strokes drive either the raw smoothstep reference or its
//! shortcut-to-adiabaticity effective trajectory; the shortcut removes
//! friction entirely at finite speed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::moore::MooreFunction;
use crate::numerics::fit::fit_line;
use crate::stress::{thermal_f, total_energy, ThermalState};
use crate::trajectory::Trajectory;

/// How the work strokes are driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StrokeKind {
    /// Drive the mirror along the smoothstep itself.
    Reference,
    /// Drive along the effective trajectory derived from the smoothstep.
    Sta,
}

impl StrokeKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Reference => "reference",
            Self::Sta => "sta",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OttoCycleSpec {
    pub l0: f64,
    pub l1: f64,
    /// Bath temperature during the isochore at length l0.
    pub t0: f64,
    /// Bath temperature during the isochore at length l1.
    pub t1: f64,
    /// Duration of each work stroke's reference ramp.
    pub tau: f64,
    pub stroke_kind: StrokeKind,
}

impl OttoCycleSpec {
    pub fn new(
        l0: f64,
        l1: f64,
        t0: f64,
        t1: f64,
        tau: f64,
        stroke_kind: StrokeKind,
    ) -> Result<Self> {
        if !(l0.is_finite() && l1.is_finite() && l0 >= l1 && l1 > 0.0) {
            return Err(Error::InvalidCycle(format!(
                "need L0 >= L1 > 0, got L0 = {l0}, L1 = {l1}"
            )));
        }
        if !(t0.is_finite() && t1.is_finite() && t0 >= 0.0 && t1 >= 0.0) {
            return Err(Error::InvalidCycle(format!(
                "bath temperatures must be non-negative, got {t0} and {t1}"
            )));
        }
        if t0.max(t1) == 0.0 {
            return Err(Error::InvalidCycle("at least one bath must be warmer than T = 0".into()));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidCycle(format!("stroke time must be positive, got {tau}")));
        }
        Ok(Self { l0, l1, t0, t1, tau, stroke_kind })
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..*self }
    }

    pub fn with_kind(&self, stroke_kind: StrokeKind) -> Self {
        Self { stroke_kind, ..*self }
    }

    /// Total cycle duration: both ramps plus a light-crossing settling
    /// allowance at each length, the same for either stroke kind.
    pub fn cycle_time(&self) -> f64 {
        2.0 * (self.l0 + self.l1 + self.tau)
    }
}

/// Quasistatic (infinitely slow) cycle bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticCycle {
    /// Net work output per cycle.
    pub w_ad: f64,
    /// Heat drawn from the bath at L1.
    pub q_ad: f64,
    /// Otto efficiency 1 - L1/L0.
    pub eta_ad: f64,
    pub eta_carnot: f64,
    /// True exactly when the cycle is not an engine (w_ad < 0): the Otto
    /// efficiency formally exceeds Carnot only where no work comes out.
    pub carnot_violated: bool,
}

pub fn cycle_adiabatic(spec: &OttoCycleSpec) -> Result<AdiabaticCycle> {
    let f_a = thermal_f(spec.t0 * spec.l0);
    let f_b = thermal_f(spec.t1 * spec.l1);
    let inv_gap = 1.0 / spec.l1 - 1.0 / spec.l0;
    let w_ad = (f_b - f_a) * inv_gap;
    let q_ad = (f_b - f_a) / spec.l1;
    let eta_ad = 1.0 - spec.l1 / spec.l0;
    let hot = spec.t0.max(spec.t1);
    let cold = spec.t0.min(spec.t1);
    let eta_carnot = 1.0 - cold / hot;
    Ok(AdiabaticCycle {
        w_ad,
        q_ad,
        eta_ad,
        eta_carnot,
        carnot_violated: eta_ad > eta_carnot,
    })
}

/// Work done on the field by a perfect adiabatic ramp between lengths.
pub fn adiabatic_stroke_work(state: &ThermalState, l_from: f64, l_to: f64) -> Result<f64> {
    if !(l_from > 0.0 && l_to > 0.0) {
        return Err(Error::Domain(format!("lengths must be positive, got {l_from}, {l_to}")));
    }
    let c = state.energy_coefficient();
    Ok(c / l_to - c / l_from)
}

#[derive(Debug, Clone, Copy)]
pub struct OttoCycleResult {
    pub w_ad: f64,
    /// Net work output including friction losses.
    pub w: f64,
    pub q_ad: f64,
    /// Heat intake at the L1 bath, reduced by compression friction.
    pub q: f64,
    /// Friction energy deposited during compression.
    pub w_fric_ab: f64,
    /// Friction energy deposited during expansion.
    pub w_fric_cd: f64,
    /// None when the cycle no longer draws heat (q <= 0).
    pub eta: Option<f64>,
    pub eta_ad: f64,
    pub power: f64,
    pub cycle_time: f64,
}

/// Energy change of the field across one work stroke.
///
/// The field starts static and thermal-coefficient `state`, is driven by
/// the ramp, and the final energy is read one light-crossing after the
/// wall stops (it is constant from the end of motion on).
fn stroke_work(spec: &OttoCycleSpec, l_from: f64, l_to: f64, state: &ThermalState) -> Result<f64> {
    let reference = Trajectory::smoothstep_between(l_from, l_to, 0.0, spec.tau)?;
    let moore = match spec.stroke_kind {
        StrokeKind::Reference => {
            let report = reference.validate();
            if !report.physical {
                return Err(Error::InvalidTrajectory(format!(
                    "reference ramp over tau = {} reaches |L'| = {:.4}; the wall may not \
                     move faster than light",
                    spec.tau, report.max_speed
                )));
            }
            MooreFunction::recursion_from(reference)?
        }
        StrokeKind::Sta => MooreFunction::wkb_from(reference)?,
    };
    let (_, t_end) = moore.worldline().motion_window();
    let e_before = state.energy_coefficient() / l_from;
    let e_after = total_energy(&moore, state, t_end + l_to)?;
    Ok(e_after - e_before)
}

pub fn cycle_finite_time(spec: &OttoCycleSpec) -> Result<OttoCycleResult> {
    let ad = cycle_adiabatic(spec)?;
    let state_a = ThermalState::new(spec.t0, spec.l0)?;
    let state_c = ThermalState::new(spec.t1, spec.l1)?;
    let w_ab = stroke_work(spec, spec.l0, spec.l1, &state_a)?;
    let w_cd = stroke_work(spec, spec.l1, spec.l0, &state_c)?;
    let w_fric_ab = w_ab - adiabatic_stroke_work(&state_a, spec.l0, spec.l1)?;
    let w_fric_cd = w_cd - adiabatic_stroke_work(&state_c, spec.l1, spec.l0)?;
    let w = ad.w_ad - w_fric_ab - w_fric_cd;
    let q = ad.q_ad - w_fric_ab;
    let cycle_time = spec.cycle_time();
    Ok(OttoCycleResult {
        w_ad: ad.w_ad,
        w,
        q_ad: ad.q_ad,
        q,
        w_fric_ab,
        w_fric_cd,
        eta: (q > 0.0).then_some(w / q),
        eta_ad: ad.eta_ad,
        power: w / cycle_time,
        cycle_time,
    })
}

/// Otto efficiency as a function of the effective compression speed
/// v = (L0 - L1) / (L0 + L1): eta = 2v / (1 + v).
pub fn efficiency_at_speed(v: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&v) {
        return Err(Error::Domain(format!("speed must lie in [0, 1), got {v}")));
    }
    Ok(2.0 * v / (1.0 + v))
}

/// Effective boundary speed of the step-limit shortcut between lengths.
pub fn speed_for_lengths(l0: f64, l1: f64) -> Result<f64> {
    if !(l0 >= l1 && l1 > 0.0) {
        return Err(Error::Domain(format!("need L0 >= L1 > 0, got {l0}, {l1}")));
    }
    Ok((l0 - l1) / (l0 + l1))
}

/// Power lost to friction relative to an adiabatic cycle of the same
/// duration.
pub fn power_deficit(result: &OttoCycleResult) -> f64 {
    (result.w_ad - result.w) / result.cycle_time
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub tau: f64,
    pub kind: StrokeKind,
    pub result: Option<OttoCycleResult>,
    /// Why the cycle could not be computed (for example a superluminal
    /// reference ramp).
    pub error: Option<String>,
}

/// Evaluate the cycle for every tau and both stroke kinds.
pub fn sweep(base: &OttoCycleSpec, taus: &[f64]) -> Vec<SweepRow> {
    let jobs: Vec<(f64, StrokeKind)> = taus
        .iter()
        .flat_map(|&tau| [(tau, StrokeKind::Reference), (tau, StrokeKind::Sta)])
        .collect();
    exec::map(&jobs, |&(tau, kind)| {
        let spec = base.with_tau(tau).with_kind(kind);
        match cycle_finite_time(&spec) {
            Ok(result) => SweepRow { tau, kind, result: Some(result), error: None },
            Err(e) => SweepRow { tau, kind, result: None, error: Some(e.to_string()) },
        }
    })
}

/// Default window and amplitude for the friction decay fit.
pub const DECAY_FIT_WINDOW: (f64, f64) = (0.05, 0.5);
pub const DECAY_FIT_EPS: f64 = 0.1;
/// Deficits below this are solver noise, not physics.
pub const DECAY_NOISE_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Slope of log deficit against log tau.
    pub exponent: f64,
    pub std_error: f64,
    /// exponent +/- 2 standard errors.
    pub ci: (f64, f64),
    pub points: usize,
}

/// Fit a power law deficit ~ tau^exponent, ignoring points at or below
/// the noise floor.
pub fn power_decay_fit(taus: &[f64], deficits: &[f64], noise_floor: f64) -> Result<DecayFit> {
    if taus.len() != deficits.len() {
        return Err(Error::Fit(format!(
            "mismatched inputs: {} taus vs {} deficits",
            taus.len(),
            deficits.len()
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&tau, &d) in taus.iter().zip(deficits.iter()) {
        if tau > 0.0 && d.is_finite() && d > noise_floor {
            xs.push(tau.ln());
            ys.push(d.ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::Fit(format!(
            "only {} points above the noise floor {noise_floor}; need at least 4",
            xs.len()
        )));
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(DecayFit {
        exponent: fit.slope,
        std_error: fit.slope_se,
        ci: (fit.slope - 2.0 * fit.slope_se, fit.slope + 2.0 * fit.slope_se),
        points: xs.len(),
    })
}

//! Regularized stress tensor of the cavity field at finite temperature.
//!
//! For a state prepared thermally at temperature T in a cavity of length
//! L0, the renormalized stress tensor is built from a single chiral
//! function of the Moore function R:
//!
//! ```text
//! G(u) = -(1/24 pi) [R'''/R' - (3/2)(R''/R')^2] + (c/2) R'(u)^2,
//! c    = -pi/24 + F(T L0),
//! F(x) = sum_{n >= 1} n pi / (e^{n pi / x} - 1),
//! ```
//!
//! with T_tt(t, x) = G(t-x) + G(t+x) and T_tx(t, x) = G(t+x) - G(t-x).
//! The occupation coefficient c is frozen at preparation: unitary driving
//! never rethermalizes the field. A cavity held static at length L then
//! carries total energy c / L, the Casimir value -pi/(24 L) at T = 0.

use std::cell::RefCell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec;
use crate::moore::MooreFunction;
use crate::numerics::quad::{integrate_with_breakpoints, QuadCfg};

/// F(x) = sum n pi / (e^{n pi / x} - 1); zero for x <= 0.
///
/// Thermal weights depend on temperature and length only through the
/// product x = T L. The tail is cut when the bounded remainder drops
/// below 1e-17 of the running total.
pub fn thermal_f(x: f64) -> f64 {
    if !(x > 0.0) {
        return 0.0;
    }
    let mut total = 0.0;
    let mut n = 1u64;
    loop {
        let a = n as f64 * PI / x;
        let term = n as f64 * PI / a.exp_m1();
        total += term;
        // tail <= term * (x / pi + 1) once a is past the linear regime
        if a > 3.0 && term * (x / PI + 1.0) < 1e-17 * (1.0 + total) {
            break;
        }
        n += 1;
        if n > 50_000_000 {
            break;
        }
    }
    total
}

/// Thermal preparation of the field: temperature and the cavity length at
/// which the state was thermalized.
#[derive(Debug, Clone, Copy)]
pub struct ThermalState {
    pub temperature: f64,
    pub initial_length: f64,
    /// F(T L0), frozen at preparation.
    pub f_value: f64,
}

impl ThermalState {
    pub fn new(temperature: f64, initial_length: f64) -> Result<Self> {
        if !temperature.is_finite() || temperature < 0.0 {
            return Err(Error::Domain(format!(
                "temperature must be finite and non-negative, got {temperature}"
            )));
        }
        if !initial_length.is_finite() || initial_length <= 0.0 {
            return Err(Error::Domain(format!(
                "preparation length must be positive, got {initial_length}"
            )));
        }
        Ok(Self {
            temperature,
            initial_length,
            f_value: thermal_f(temperature * initial_length),
        })
    }

    pub fn vacuum(initial_length: f64) -> Result<Self> {
        Self::new(0.0, initial_length)
    }

    /// c = -pi/24 + F(T L0); the static cavity energy is c / L.
    pub fn energy_coefficient(&self) -> f64 {
        -PI / 24.0 + self.f_value
    }

    /// True when the Casimir and thermal terms cancel and the adiabatic
    /// reference energy c / L is useless as a denominator.
    pub fn is_singular(&self) -> bool {
        // c is a cancellation of two terms of this size
        let scale = PI / 24.0 + self.f_value;
        self.energy_coefficient().abs() <= 1e-10 * scale
    }
}

/// The chiral stress component G(u).
pub fn g_function(moore: &MooreFunction, state: &ThermalState, u: f64) -> Result<f64> {
    let [d1, d2, d3] = moore.derivs(u)?;
    let ratio = d2 / d1;
    let schwarz = d3 / d1 - 1.5 * ratio * ratio;
    Ok(-schwarz / (24.0 * PI) + 0.5 * state.energy_coefficient() * d1 * d1)
}

#[derive(Debug, Clone, Copy)]
pub struct StressTensor {
    /// Energy density T_tt.
    pub ttt: f64,
    /// Energy flux T_tx.
    pub ttx: f64,
}

pub fn stress_tensor(
    moore: &MooreFunction,
    state: &ThermalState,
    t: f64,
    x: f64,
) -> Result<StressTensor> {
    let l = moore.boundary_length(t);
    if !(0.0..=l).contains(&x) {
        return Err(Error::Domain(format!("x = {x} outside cavity [0, {l}] at t = {t}")));
    }
    let g_minus = g_function(moore, state, t - x)?;
    let g_plus = g_function(moore, state, t + x)?;
    Ok(StressTensor { ttt: g_minus + g_plus, ttx: g_plus - g_minus })
}

/// Route a fallible integrand through the quadrature, smuggling the first
/// error out via NaN.
fn integrate_result(
    f: impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: QuadCfg,
) -> Result<f64> {
    let captured: RefCell<Option<Error>> = RefCell::new(None);
    let wrapped = |u: f64| match f(u) {
        Ok(v) => v,
        Err(e) => {
            let mut slot = captured.borrow_mut();
            if slot.is_none() {
                *slot = Some(e);
            }
            f64::NAN
        }
    };
    match integrate_with_breakpoints(wrapped, a, b, breakpoints, cfg) {
        Ok(v) => match captured.into_inner() {
            None => Ok(v),
            Some(e) => Err(e),
        },
        Err(q) => Err(captured.into_inner().unwrap_or(q)),
    }
}

/// E(t) = integral of T_tt over the cavity, folded onto the single chiral
/// function: E(t) = integral of G over [t - L(t), t + L(t)].
pub fn total_energy(moore: &MooreFunction, state: &ThermalState, t: f64) -> Result<f64> {
    total_energy_with(moore, state, t, QuadCfg { abs_tol: 1e-11, rel_tol: 1e-12, max_panels: 400_000 })
}

pub fn total_energy_with(
    moore: &MooreFunction,
    state: &ThermalState,
    t: f64,
    cfg: QuadCfg,
) -> Result<f64> {
    let l = moore.boundary_length(t);
    let (a, b) = (t - l, t + l);
    let kinks = moore.kinks_between(a, b)?;
    integrate_result(|u| g_function(moore, state, u), a, b, &kinks, cfg)
}

/// Energy of the state after perfect adiabatic following to length `l`.
pub fn adiabatic_energy(state: &ThermalState, l: f64) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::Domain(format!("cavity length must be positive, got {l}")));
    }
    Ok(state.energy_coefficient() / l)
}

/// Q*(t) = E(t) / E_ad(L(t)); exactly 1 under perfect adiabatic following.
///
/// Near the temperature where -pi/24 + F(T L0) changes sign the adiabatic
/// reference energy vanishes and the ratio loses meaning.
pub fn adiabaticity_parameter(
    moore: &MooreFunction,
    state: &ThermalState,
    t: f64,
) -> Result<f64> {
    if state.is_singular() {
        return Err(Error::Singularity(format!(
            "adiabatic reference energy vanishes: -pi/24 + F = {} at T L0 = {}",
            state.energy_coefficient(),
            state.temperature * state.initial_length
        )));
    }
    let e = total_energy(moore, state, t)?;
    let ad = state.energy_coefficient() / moore.boundary_length(t);
    Ok(e / ad)
}

#[derive(Debug, Clone, Copy)]
pub struct DensityRow {
    pub t: f64,
    pub x: f64,
    /// None when (t, x) lies outside the cavity.
    pub ttt: Option<f64>,
    pub ttx: Option<f64>,
}

/// Stress tensor over a (t, x) grid; points outside the cavity give None
/// fields rather than errors so rectangular grids stay rectangular.
pub fn sample_density(
    moore: &MooreFunction,
    state: &ThermalState,
    ts: &[f64],
    xs: &[f64],
) -> Result<Vec<DensityRow>> {
    let blocks = exec::map(ts, |&t| -> Result<Vec<DensityRow>> {
        let l = moore.boundary_length(t);
        xs.iter()
            .map(|&x| {
                if (0.0..=l).contains(&x) {
                    let s = stress_tensor(moore, state, t, x)?;
                    Ok(DensityRow { t, x, ttt: Some(s.ttt), ttx: Some(s.ttx) })
                } else {
                    Ok(DensityRow { t, x, ttt: None, ttx: None })
                }
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(ts.len() * xs.len());
    for block in blocks {
        rows.extend(block?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
pub struct EnergyRecord {
    pub t: f64,
    pub energy: f64,
    pub adiabatic: f64,
    /// None when the adiabatic reference energy is singular.
    pub q_star: Option<f64>,
}

pub fn sample_energy_curve(
    moore: &MooreFunction,
    state: &ThermalState,
    ts: &[f64],
) -> Result<Vec<EnergyRecord>> {
    let singular = state.is_singular();
    let c = state.energy_coefficient();
    exec::map(ts, |&t| -> Result<EnergyRecord> {
        let energy = total_energy(moore, state, t)?;
        let adiabatic = c / moore.boundary_length(t);
        Ok(EnergyRecord {
            t,
            energy,
            adiabatic,
            q_star: (!singular).then(|| energy / adiabatic),
        })
    })
    .into_iter()
    .collect()
}

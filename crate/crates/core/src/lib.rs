//! Massless scalar field in a 1+1D cavity with one moving mirror.
//!
//! The field obeys Dirichlet conditions at x = 0 and x = L(t). All of its
//! dynamics is carried by a Moore function R with
//! R(t + L(t)) - R(t - L(t)) = 2; the renormalized stress tensor, total
//! energy, and particle content follow from R and its first three
//! derivatives. Natural units throughout: c = hbar = kB = 1.
//!
//! What lives where:
//!
//! - [`trajectory`]: mirror worldlines L(t) (smoothstep ramps, steps,
//!   splines through samples, composites) with exact one-sided
//!   derivatives and physicality validation.
//! - [`sta`]: shortcuts to adiabaticity. The WKB phase of a reference
//!   ramp defines an effective trajectory that reproduces adiabatic field
//!   evolution at finite speed, with zero residual excitation.
//! - [`moore`]: Moore function solvers (ray-bounce recursion and the WKB
//!   phase), mode functions, and residual extraction after motion.
//! - [`stress`]: finite-temperature stress tensor, total energy, and the
//!   adiabaticity parameter Q*.
//! - [`otto`]: quantum Otto cycles driven by either the raw ramp or its
//!   shortcut, friction bookkeeping, tau sweeps, and decay fits.
//! - [`numerics`]: the small numerical toolbox (adaptive Gauss-Legendre
//!   quadrature, bracketed root solving, cubic splines, line fits).
//! - [`exec`]: data-parallel map with a sequential fallback, selected by
//!   the `parallel` feature.

pub mod error;
pub mod exec;
pub mod moore;
pub mod numerics;
pub mod otto;
pub mod sta;
pub mod stress;
pub mod trajectory;

pub use error::{Error, Result};
pub use moore::{extract_residual, ray_advance, MooreFunction, Residual, RESIDUAL_SAMPLES};
pub use otto::{
    cycle_adiabatic, cycle_finite_time, efficiency_at_speed, power_decay_fit, power_deficit,
    speed_for_lengths, sweep, AdiabaticCycle, DecayFit, OttoCycleResult, OttoCycleSpec,
    StrokeKind, SweepRow, DECAY_FIT_EPS, DECAY_FIT_WINDOW, DECAY_NOISE_FLOOR,
};
pub use sta::{
    cavity_mode_frequency, effective_frequency, effective_trajectory_step, EffectiveFrequency,
    EffectiveTrajectory, WkbPhase,
};
pub use stress::{
    adiabatic_energy, adiabaticity_parameter, g_function, sample_density, sample_energy_curve,
    stress_tensor, thermal_f, total_energy, total_energy_with, DensityRow, EnergyRecord,
    StressTensor, ThermalState,
};
pub use trajectory::{
    validate, validate_with, Continuity, DerivSample, Side, SideTag, Trajectory, TrajectorySpec,
    ValidationReport, Worldline,
};

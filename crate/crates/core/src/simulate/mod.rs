//! Fixed-step RK4 integration of the nonlinear model for each kernel,
//! bifurcation sweeps over the mean delay and phase portraits.
//!
//! History is constant `n0` for `t <= 0`. Point and uniform delays read the
//! past through cubic Hermite interpolation of the stored grid; the uniform
//! window mean is the difference of an interpolated running integral. Gamma
//! kernels are integrated through the linear chain, with a direct
//! quadrature integrator kept as an independent check.

mod gamma;
mod history;
mod phase;
mod scalar;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Kernel, ModelParams};

use gamma::{GammaChain, GammaDirect};
use scalar::{Feedback, ScalarDelay};

pub use phase::{phase_portrait, PhaseOptions, PhasePortrait};
pub use sweep::{
    bifurcation_sweep, settle, BifurcationRow, Envelope, SweepConfig, SweepResult, Transition,
    TransitionKind,
};

/// Largest order accepted by the direct gamma integrator.
pub const DIRECT_MAX_ORDER: u32 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Time step; `None` means `1e-3 tau_m` with floor `1e-4`.
    #[serde(default)]
    pub step: Option<f64>,
    pub t_end: f64,
    /// Discarded start of the run; `None` means 60% of `t_end`.
    #[serde(default)]
    pub transient: Option<f64>,
    /// Constant history `n0`; `None` means `0.8 n*`.
    #[serde(default)]
    pub history_value: Option<f64>,
    /// Oscillation threshold relative to `n*`.
    #[serde(default = "default_amplitude_tol")]
    pub amplitude_tol: f64,
    /// Keep every `record_stride`-th step in the trajectory.
    #[serde(default = "default_stride")]
    pub record_stride: usize,
}

fn default_amplitude_tol() -> f64 {
    1e-4
}

fn default_stride() -> usize {
    1
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(200.0)
    }
}

impl SimConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            step: None,
            t_end,
            transient: None,
            history_value: None,
            amplitude_tol: default_amplitude_tol(),
            record_stride: default_stride(),
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn with_history(mut self, n0: f64) -> Self {
        self.history_value = Some(n0);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("t_end", format!("must be finite and > 0, got {}", self.t_end)));
        }
        if let Some(step) = self.step {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::invalid("step", format!("must be finite and > 0, got {step}")));
            }
        }
        let transient = self.transient_time();
        if !(transient.is_finite() && transient >= 0.0 && transient < self.t_end) {
            return Err(Error::invalid(
                "transient",
                format!("must lie in [0, t_end), got {transient}"),
            ));
        }
        if let Some(n0) = self.history_value {
            if !(n0.is_finite() && n0 > 0.0) {
                return Err(Error::invalid("history_value", format!("must be finite and > 0, got {n0}")));
            }
        }
        if !(self.amplitude_tol.is_finite() && self.amplitude_tol > 0.0) {
            return Err(Error::invalid(
                "amplitude_tol",
                format!("must be finite and > 0, got {}", self.amplitude_tol),
            ));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn transient_time(&self) -> f64 {
        self.transient.unwrap_or(0.6 * self.t_end)
    }

    pub fn initial(&self, params: &ModelParams) -> f64 {
        self.history_value.unwrap_or(0.8 * params.equilibrium())
    }

    /// Step for mean delay `tau_m`. An explicit step must satisfy
    /// `step < tau_m / 20`; the default is capped at `tau_m / 40`.
    pub fn step_for(&self, tau_m: f64) -> Result<f64> {
        match self.step {
            Some(step) => {
                if tau_m > 0.0 && step >= tau_m / 20.0 {
                    return Err(Error::StepTooLarge {
                        step,
                        reason: format!("must be below tau_m / 20 = {}", tau_m / 20.0),
                    });
                }
                Ok(step)
            }
            None if tau_m > 0.0 => Ok((1e-3 * tau_m).max(1e-4).min(tau_m / 40.0)),
            None => Ok(1e-4),
        }
    }
}

/// Sampled solution. `delayed` is the feedback term: `n(t - tau)` for a
/// point delay, the kernel-weighted mean of the past otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub delayed: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(min, max)` of `n` over samples with `t >= from`.
    pub fn extrema_after(&self, from: f64) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t >= from)
            .fold(None, |acc, (_, &v)| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// Sup-norm distance of `n` at common sample times.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        let mut j = 0;
        let mut worst: f64 = 0.0;
        for (i, &t) in self.times.iter().enumerate() {
            while j < other.times.len() && other.times[j] < t - 1e-9 {
                j += 1;
            }
            if j < other.times.len() && (other.times[j] - t).abs() <= 1e-9 {
                worst = worst.max((self.values[i] - other.values[j]).abs());
            }
        }
        worst
    }
}

/// One integrator, advanced a step at a time on the grid `t_i = i * step`.
pub(crate) trait Stepper {
    fn time(&self) -> f64;
    fn population(&self) -> f64;
    fn feedback(&self) -> f64;
    fn advance(&mut self) -> Result<()>;
}

/// How gamma kernels are integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaMethod {
    #[default]
    Chain,
    Direct,
}

pub(crate) fn stepper(
    params: &ModelParams,
    kernel: Kernel,
    tau_m: f64,
    step: f64,
    initial: f64,
    method: GammaMethod,
) -> Result<Box<dyn Stepper + Send>> {
    kernel.validate()?;
    if !(tau_m.is_finite() && tau_m >= 0.0) {
        return Err(Error::invalid("tau_m", format!("must be finite and >= 0, got {tau_m}")));
    }
    if tau_m == 0.0 {
        // every kernel collapses to the undelayed equation
        return Ok(Box::new(ScalarDelay::new(*params, Feedback::Instant, step, initial)?));
    }
    Ok(match kernel {
        Kernel::Dirac => {
            // align the grid with the lag so the kink at t = tau is a node
            let per_lag = (tau_m / step).ceil();
            let aligned = tau_m / per_lag;
            Box::new(ScalarDelay::new(*params, Feedback::Point { lag: tau_m }, aligned, initial)?)
        }
        Kernel::Uniform { sigma } => {
            let near = tau_m * (1.0 - 0.5 * sigma);
            let far = tau_m * (1.0 + 0.5 * sigma);
            Box::new(ScalarDelay::new(*params, Feedback::Window { near, far }, step, initial)?)
        }
        Kernel::Gamma { p } => match method {
            GammaMethod::Chain => Box::new(GammaChain::new(*params, p, tau_m, step, initial)),
            GammaMethod::Direct => {
                if p > DIRECT_MAX_ORDER {
                    return Err(Error::invalid(
                        "p",
                        format!("direct quadrature supports p <= {DIRECT_MAX_ORDER}, got {p}"),
                    ));
                }
                Box::new(GammaDirect::new(*params, p, tau_m, step, initial))
            }
        },
    })
}

/// Default step for the uniform kernel also respects the window's near
/// edge, which must be at least one step away.
fn resolved_step(config: &SimConfig, kernel: Kernel, tau_m: f64) -> Result<f64> {
    let step = config.step_for(tau_m)?;
    match kernel {
        Kernel::Uniform { sigma } if config.step.is_none() && tau_m > 0.0 => {
            Ok(step.min(tau_m * (1.0 - 0.5 * sigma)))
        }
        _ => Ok(step),
    }
}

fn record(mut s: Box<dyn Stepper + Send>, t_end: f64, stride: usize) -> Result<Trajectory> {
    let mut traj = Trajectory {
        times: Vec::new(),
        values: Vec::new(),
        delayed: Vec::new(),
    };
    let push = |s: &dyn Stepper, traj: &mut Trajectory| {
        traj.times.push(s.time());
        traj.values.push(s.population());
        traj.delayed.push(s.feedback());
    };
    push(s.as_ref(), &mut traj);
    let mut i = 0usize;
    // the last step may overshoot t_end by less than one step
    while s.time() < t_end - 1e-12 * t_end.max(1.0) {
        s.advance()?;
        i += 1;
        if i.is_multiple_of(stride) {
            push(s.as_ref(), &mut traj);
        }
    }
    if !i.is_multiple_of(stride) {
        push(s.as_ref(), &mut traj);
    }
    Ok(traj)
}

/// Simulate with any kernel; gamma kernels use the linear chain.
pub fn simulate(params: &ModelParams, kernel: Kernel, tau_m: f64, config: &SimConfig) -> Result<Trajectory> {
    simulate_with(params, kernel, tau_m, config, GammaMethod::Chain)
}

pub fn simulate_with(
    params: &ModelParams,
    kernel: Kernel,
    tau_m: f64,
    config: &SimConfig,
    method: GammaMethod,
) -> Result<Trajectory> {
    config.validate()?;
    let step = resolved_step(config, kernel, tau_m)?;
    let s = stepper(params, kernel, tau_m, step, config.initial(params), method)?;
    record(s, config.t_end, config.record_stride)
}

/// `dn/dt = r n (1 - n(t - tau)/K) + D`; `tau = 0` gives the logistic ODE.
pub fn simulate_dirac(params: &ModelParams, tau: f64, config: &SimConfig) -> Result<Trajectory> {
    simulate(params, Kernel::Dirac, tau, config)
}

pub fn simulate_uniform(params: &ModelParams, tau: f64, sigma: f64, config: &SimConfig) -> Result<Trajectory> {
    let kernel = Kernel::uniform(sigma)?;
    if !(tau > 0.0) {
        return Err(Error::invalid("tau_m", format!("must be > 0 for the uniform kernel, got {tau}")));
    }
    simulate(params, kernel, tau, config)
}

/// Linear chain of dimension `p + 1`, all stages starting at `n0`.
pub fn simulate_gamma_chain(params: &ModelParams, p: u32, tau_m: f64, config: &SimConfig) -> Result<Trajectory> {
    let kernel = Kernel::gamma(p)?;
    if !(tau_m > 0.0) {
        return Err(Error::invalid("tau_m", format!("must be > 0 for the gamma kernel, got {tau_m}")));
    }
    simulate_with(params, kernel, tau_m, config, GammaMethod::Chain)
}

/// Direct quadrature of the gamma-weighted history; `p <= 4`.
pub fn simulate_gamma_direct(params: &ModelParams, p: u32, tau_m: f64, config: &SimConfig) -> Result<Trajectory> {
    let kernel = Kernel::gamma(p)?;
    if !(tau_m > 0.0) {
        return Err(Error::invalid("tau_m", format!("must be > 0 for the gamma kernel, got {tau_m}")));
    }
    simulate_with(params, kernel, tau_m, config, GammaMethod::Direct)
}

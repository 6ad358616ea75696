use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{resolved_step, stepper, GammaMethod, SimConfig, Stepper};
use crate::error::{Error, Result};
use crate::model::{Kernel, ModelParams};

/// Blocks per initial horizon; min/max is tracked per block so the
/// horizon can be extended without re-running.
const BLOCKS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub sim: SimConfig,
    /// Horizon in units of `tau_m`; each row runs to
    /// `max(sim.t_end, horizon * tau_m)`. Zero keeps `sim.t_end`.
    #[serde(default)]
    pub horizon: f64,
    /// Step as a fraction of `tau_m`, overriding `sim.step`.
    #[serde(default)]
    pub step_fraction: Option<f64>,
    /// Times the horizon may double while the amplitude is still trending
    /// across the threshold.
    #[serde(default = "default_doublings")]
    pub max_doublings: u32,
}

fn default_doublings() -> u32 {
    3
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::new(100.0),
            horizon: 1000.0,
            step_fraction: None,
            max_doublings: default_doublings(),
        }
    }
}

impl SweepConfig {
    fn row_config(&self, tau_m: f64) -> SimConfig {
        let mut sim = self.sim.clone();
        sim.t_end = sim.t_end.max(self.horizon * tau_m);
        if let Some(f) = self.step_fraction {
            sim.step = Some(f * tau_m);
        }
        if self.sim.transient.is_some() {
            // an absolute transient does not scale; keep the fraction
            sim.transient = Some(self.sim.transient_time() / self.sim.t_end * sim.t_end);
        }
        sim
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationRow {
    pub tau_m: f64,
    pub n_min: f64,
    pub n_max: f64,
    pub oscillating: bool,
    /// Horizon actually simulated, after doublings.
    pub t_end: f64,
    /// Set when the run failed; extrema are then NaN.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    /// Oscillation appears as `tau_m` increases.
    Onset,
    /// Oscillation disappears as `tau_m` increases.
    Offset,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    /// Midpoint between the two rows whose flags differ.
    pub tau_m: f64,
    pub kind: TransitionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<BifurcationRow>,
    pub transitions: Vec<Transition>,
}

impl SweepResult {
    /// Detected Hopf location: the first flag change.
    pub fn first_transition(&self) -> Option<Transition> {
        self.transitions.first().copied()
    }

    pub fn first(&self, kind: TransitionKind) -> Option<f64> {
        self.transitions.iter().find(|t| t.kind == kind).map(|t| t.tau_m)
    }
}

/// Post-transient extrema of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub n_min: f64,
    pub n_max: f64,
    pub t_end: f64,
}

/// Run `stepper` to `t_end`, doubling the horizon while the post-transient
/// amplitude sits on one side of `tol_abs` and its second half trends
/// toward the other side.
pub(crate) fn settle_stepper(
    s: &mut dyn Stepper,
    t_end: f64,
    transient_fraction: f64,
    tol_abs: f64,
    max_doublings: u32,
) -> Result<Envelope> {
    let block = t_end / BLOCKS as f64;
    let mut mins: Vec<f64> = Vec::new();
    let mut maxs: Vec<f64> = Vec::new();
    let mut target_blocks = BLOCKS;
    let mut doublings = 0;
    let window = |mins: &[f64], maxs: &[f64], from: usize, to: usize| -> (f64, f64) {
        let lo = mins[from..to].iter().copied().fold(f64::INFINITY, f64::min);
        let hi = maxs[from..to].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    loop {
        while mins.len() < target_blocks {
            let end = block * (mins.len() + 1) as f64;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            while s.time() < end - 1e-9 * block {
                s.advance()?;
                let n = s.population();
                lo = lo.min(n);
                hi = hi.max(n);
            }
            mins.push(lo);
            maxs.push(hi);
        }
        let start = ((transient_fraction * target_blocks as f64).round() as usize).min(target_blocks - 2);
        let mid = (start + target_blocks) / 2;
        let (lo_a, hi_a) = window(&mins, &maxs, start, mid);
        let (lo_b, hi_b) = window(&mins, &maxs, mid, target_blocks);
        let (amp_a, amp_b) = (hi_a - lo_a, hi_b - lo_b);
        let amp = hi_a.max(hi_b) - lo_a.min(lo_b);
        // the reported flag uses `amp`; keep going while it may still flip
        let decaying_above = amp > tol_abs && amp_b < 0.95 * amp_a;
        let growing_below = amp <= tol_abs && amp_b > 1.05 * amp_a;
        if (decaying_above || growing_below) && doublings < max_doublings {
            doublings += 1;
            target_blocks *= 2;
            continue;
        }
        let (n_min, n_max) = window(&mins, &maxs, start, target_blocks);
        return Ok(Envelope {
            n_min,
            n_max,
            t_end: block * target_blocks as f64,
        });
    }
}

/// Asymptotic extrema at one delay, with horizon doubling.
pub fn settle(
    params: &ModelParams,
    kernel: Kernel,
    tau_m: f64,
    config: &SimConfig,
    max_doublings: u32,
) -> Result<Envelope> {
    config.validate()?;
    let step = resolved_step(config, kernel, tau_m)?;
    let mut s = stepper(params, kernel, tau_m, step, config.initial(params), GammaMethod::Chain)?;
    let fraction = config.transient_time() / config.t_end;
    let tol_abs = config.amplitude_tol * params.equilibrium();
    settle_stepper(s.as_mut(), config.t_end, fraction, tol_abs, max_doublings)
}

/// Envelope of the attractor on an even grid of `n_points` delays in
/// `tau_range`, rows sorted by delay. Failed rows are kept with `error`
/// set and skipped when locating transitions.
pub fn bifurcation_sweep(
    params: &ModelParams,
    kernel: Kernel,
    tau_range: (f64, f64),
    n_points: usize,
    config: &SweepConfig,
) -> Result<SweepResult> {
    let (lo, hi) = tau_range;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Error::invalid("tau_range", format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    if n_points < 2 {
        return Err(Error::invalid("n_points", format!("must be >= 2, got {n_points}")));
    }
    kernel.validate()?;
    config.sim.validate()?;
    if let Some(f) = config.step_fraction {
        if !(f > 0.0 && f < 0.05) {
            return Err(Error::invalid("step_fraction", format!("must lie in (0, 0.05), got {f}")));
        }
    }
    let n_star = params.equilibrium();
    let tol_abs = config.sim.amplitude_tol * n_star;

    let mut rows: Vec<BifurcationRow> = (0..n_points)
        .into_par_iter()
        .map(|i| {
            let tau_m = lo + (hi - lo) * i as f64 / (n_points - 1) as f64;
            let sim = config.row_config(tau_m);
            match settle(params, kernel, tau_m, &sim, config.max_doublings) {
                Ok(env) => BifurcationRow {
                    tau_m,
                    n_min: env.n_min,
                    n_max: env.n_max,
                    oscillating: env.n_max - env.n_min > tol_abs,
                    t_end: env.t_end,
                    error: None,
                },
                Err(e) => BifurcationRow {
                    tau_m,
                    n_min: f64::NAN,
                    n_max: f64::NAN,
                    oscillating: false,
                    t_end: sim.t_end,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    rows.sort_by(|a, b| a.tau_m.total_cmp(&b.tau_m));

    let transitions = rows
        .iter()
        .filter(|r| r.error.is_none())
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0].oscillating != w[1].oscillating)
        .map(|w| Transition {
            tau_m: 0.5 * (w[0].tau_m + w[1].tau_m),
            kind: if w[1].oscillating {
                TransitionKind::Onset
            } else {
                TransitionKind::Offset
            },
        })
        .collect();
    Ok(SweepResult { rows, transitions })
}

use serde::Serialize;

use super::Trajectory;

/// Samples per cycle when comparing the first and last cycles.
const RESAMPLE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseOptions {
    /// Samples with `t < transient` are dropped.
    pub transient: f64,
    /// Largest first-to-last cycle distance, relative to the amplitude,
    /// that still counts as a closed curve.
    pub closure_tol: f64,
    /// Amplitudes below `amplitude_tol * mean(n)` count as a fixed point.
    pub amplitude_tol: f64,
}

impl PhaseOptions {
    pub fn new(transient: f64) -> Self {
        Self {
            transient,
            closure_tol: 0.05,
            amplitude_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhasePortrait {
    pub times: Vec<f64>,
    pub n: Vec<f64>,
    pub delayed: Vec<f64>,
    pub amplitude: f64,
    /// Complete cycles between upward crossings of the mean.
    pub cycles: usize,
    /// Max distance between the resampled first and last cycles.
    pub cycle_gap: Option<f64>,
    pub limit_cycle: bool,
}

/// Post-transient `(n, feedback)` pairs and a closed-orbit test.
pub fn phase_portrait(traj: &Trajectory, opts: &PhaseOptions) -> PhasePortrait {
    let start = traj.times.partition_point(|&t| t < opts.transient);
    let times = traj.times[start..].to_vec();
    let n = traj.values[start..].to_vec();
    let delayed = traj.delayed[start..].to_vec();

    let (lo, hi) = n
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let amplitude = if n.is_empty() { 0.0 } else { hi - lo };
    let mean = if n.is_empty() { 0.0 } else { n.iter().sum::<f64>() / n.len() as f64 };

    let ups: Vec<usize> = (1..n.len()).filter(|&i| n[i - 1] < mean && n[i] >= mean).collect();
    let cycles = ups.len().saturating_sub(1);
    let cycle_gap = (cycles >= 2).then(|| {
        let first = resample(&n, &delayed, ups[0], ups[1]);
        let last = resample(&n, &delayed, ups[ups.len() - 2], ups[ups.len() - 1]);
        first
            .iter()
            .zip(&last)
            .map(|(a, b)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
            .fold(0.0, f64::max)
    });
    let oscillating = amplitude > opts.amplitude_tol * mean.abs();
    let limit_cycle = oscillating && cycle_gap.is_some_and(|g| g <= opts.closure_tol * amplitude);

    PhasePortrait {
        times,
        n,
        delayed,
        amplitude,
        cycles,
        cycle_gap,
        limit_cycle,
    }
}

/// `RESAMPLE` points evenly spaced in sample index over `[a, b]`.
fn resample(n: &[f64], delayed: &[f64], a: usize, b: usize) -> Vec<(f64, f64)> {
    (0..RESAMPLE)
        .map(|k| {
            let x = a as f64 + (b - a) as f64 * k as f64 / RESAMPLE as f64;
            let i = x.floor() as usize;
            let f = x - i as f64;
            let j = (i + 1).min(b);
            (n[i] + f * (n[j] - n[i]), delayed[i] + f * (delayed[j] - delayed[i]))
        })
        .collect()
}

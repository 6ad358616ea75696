use serde_json::{json, Map, Value};

use super::config::{CommandName, RunConfig};
use super::figures::reproduce_figure;
use super::format::Table;
use super::CliError;
use crate::model::{characteristic, transforms, Kernel, ModelParams};
use crate::simulate::{
    bifurcation_sweep, phase_portrait, simulate, PhaseOptions, SimConfig, SweepConfig, SweepResult, Trajectory,
};
use crate::stability::{
    classify, hopf_curve_dpos, hopf_points, GammaThresholds, HopfPoint, ScanOptions, StabilityVerdict,
};

/// Largest `|Delta(i omega)|` accepted for an emitted Hopf row.
const HOPF_RESIDUAL: f64 = 1e-9;

/// Tables to write plus a JSON summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub summary: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.summary).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// Execute one command without touching the file system.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let mut summary = Map::new();
    summary.insert("command".into(), json!(cfg.command.as_str()));
    let mut tables = Vec::new();
    match cfg.command {
        CommandName::Equilibrium => {
            let params = cfg.params()?;
            summary.insert("params".into(), params_json(&params));
            summary.insert("n_star".into(), json!(params.equilibrium()));
            summary.insert("thresholds".into(), thresholds_json(cfg.k, cfg.d));
        }
        CommandName::Transforms => {
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
            tables.push(transform_table("transforms.csv", cfg.kernel, cfg.omega_max.unwrap_or(20.0), cfg.points.unwrap_or(2001))?);
        }
        CommandName::Hopf => {
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
            summary.insert("K".into(), json!(cfg.k));
            summary.insert("D".into(), json!(cfg.d));
            summary.insert("thresholds".into(), thresholds_json(cfg.k, cfg.d));
            if cfg.d > 0.0 {
                let (table, curve_summary) = hopf_curve_table("hopf.csv", cfg.kernel, cfg.k, cfg.d, cfg.r)?;
                tables.push(table);
                summary.extend(curve_summary);
            } else {
                let params = cfg.params()?;
                let points = hopf_points(&params, cfg.kernel, &ScanOptions::default())?;
                summary.insert("crossings".into(), crossings_json(&points));
                tables.push(hopf_table("hopf.csv", &params, cfg.kernel, &points)?);
            }
        }
        CommandName::Region => {
            let table = region_table("region.csv", cfg)?;
            tables.push(table);
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
        }
        CommandName::Classify => {
            let params = cfg.params()?;
            let tau = cfg.require_tau()?;
            let verdict = classify(&params, cfg.kernel, tau)?;
            summary.insert("params".into(), params_json(&params));
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
            summary.insert("tau_m".into(), json!(tau));
            summary.insert("n_star".into(), json!(params.equilibrium()));
            summary.insert("verdict".into(), verdict_json(&verdict));
        }
        CommandName::Simulate => {
            let params = cfg.params()?;
            let tau = cfg.require_tau()?;
            let sim = sim_config(cfg, 200.0);
            let traj = simulate(&params, cfg.kernel, tau, &sim)?;
            let (lo, hi) = traj.extrema_after(sim.transient_time()).unwrap_or((f64::NAN, f64::NAN));
            summary.insert("params".into(), params_json(&params));
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
            summary.insert("tau_m".into(), json!(tau));
            summary.insert("n_star".into(), json!(params.equilibrium()));
            summary.insert("n_min".into(), json!(lo));
            summary.insert("n_max".into(), json!(hi));
            tables.push(trajectory_table("trajectory.csv", &traj));
        }
        CommandName::Bifurcation => {
            let params = cfg.params()?;
            let range = cfg.require_tau_range()?;
            let sweep = sweep_config(cfg);
            let result = bifurcation_sweep(&params, cfg.kernel, range, cfg.points.unwrap_or(101), &sweep)?;
            summary.insert("params".into(), params_json(&params));
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
            summary.extend(sweep_summary(&params, cfg.kernel, &result)?);
            tables.push(bifurcation_table("bifurcation.csv", &result));
        }
        CommandName::Phase => {
            let params = cfg.params()?;
            let tau = cfg.require_tau()?;
            let sim = sim_config(cfg, 300.0);
            let (table, phase) = phase_table("phase.csv", &params, cfg.kernel, tau, &sim)?;
            summary.insert("params".into(), params_json(&params));
            summary.insert("kernel".into(), json!(cfg.kernel.to_string()));
            summary.insert("tau_m".into(), json!(tau));
            summary.extend(phase);
            tables.push(table);
        }
        CommandName::ReproduceFigure => {
            let id = cfg.require_figure()?;
            let report = reproduce_figure(id)?;
            return Ok(report);
        }
    }
    Ok(Report {
        summary: Value::Object(summary),
        tables,
    })
}

pub(crate) fn params_json(params: &ModelParams) -> Value {
    json!({ "r": params.r(), "K": params.k(), "D": params.d() })
}

pub(crate) fn thresholds_json(k: f64, d: f64) -> Value {
    let th = GammaThresholds::new(k, d);
    json!({
        "gamma2_r_star": th.r_star,
        "gamma3_r_lower": th.r_lower,
        "gamma3_r_upper": th.r_upper,
    })
}

pub(crate) fn crossings_json(points: &[HopfPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| json!({ "omega": p.omega, "r": p.r, "tau_m": p.tau_m, "crossing": p.crossing.as_str() }))
            .collect(),
    )
}

fn verdict_json(v: &StabilityVerdict) -> Value {
    json!({
        "state": v.state,
        "margin": v.margin,
        "marginal": v.marginal,
        "unstable_pairs": v.unstable_pairs,
        "crossings": crossings_json(&v.crossings),
    })
}

pub(crate) fn sim_config(cfg: &RunConfig, default_t_end: f64) -> SimConfig {
    let mut sim = SimConfig::new(cfg.t_end.unwrap_or(default_t_end));
    sim.step = cfg.step;
    sim.history_value = cfg.history;
    sim.record_stride = cfg.stride.unwrap_or(10);
    sim
}

fn sweep_config(cfg: &RunConfig) -> SweepConfig {
    let defaults = SweepConfig::default();
    let mut sim = SimConfig::new(cfg.t_end.unwrap_or(defaults.sim.t_end));
    sim.history_value = cfg.history;
    SweepConfig {
        sim,
        horizon: cfg.horizon.unwrap_or(defaults.horizon),
        step_fraction: cfg.step_fraction,
        max_doublings: defaults.max_doublings,
    }
}

pub(crate) fn transform_table(path: &str, kernel: Kernel, omega_max: f64, points: usize) -> Result<Table, CliError> {
    let tr = transforms(kernel)?;
    let mut t = Table::new(path, &["omega", "c", "s", "dc", "ds"]);
    for i in 0..points {
        let omega = omega_max * i as f64 / (points - 1) as f64;
        let p = tr.at(omega)?;
        t.push(vec![p.omega.into(), p.c.into(), p.s.into(), p.dc.into(), p.ds.into()]);
    }
    Ok(t)
}

/// Hopf rows, each re-checked against the characteristic function.
pub(crate) fn hopf_table(path: &str, params: &ModelParams, kernel: Kernel, points: &[HopfPoint]) -> Result<Table, CliError> {
    let mut t = Table::new(path, &["omega", "r", "tau_m", "crossing"]);
    for p in points {
        let at = params.with_r(p.r)?;
        let residual = characteristic(&at, kernel, p.tau_m, num_complex::Complex64::new(0.0, p.omega))?
            .delta
            .norm();
        if residual > HOPF_RESIDUAL {
            return Err(CliError::Numerical(crate::Error::OffCurve {
                omega: p.omega,
                residual,
            }));
        }
        t.push(vec![p.omega.into(), p.r.into(), p.tau_m.into(), p.crossing.as_str().into()]);
    }
    Ok(t)
}

/// Hopf curve for `D > 0` plus, when `r` is given, the crossings there.
pub(crate) fn hopf_curve_table(
    path: &str,
    kernel: Kernel,
    k: f64,
    d: f64,
    r: Option<f64>,
) -> Result<(Table, Map<String, Value>), CliError> {
    let curve = hopf_curve_dpos(kernel, k, d)?;
    let any = ModelParams::new(1.0, k, d)?;
    let table = hopf_table(path, &any, kernel, &curve.points)?;
    let mut summary = Map::new();
    summary.insert("curve_points".into(), json!(curve.points.len()));
    summary.insert("min_r".into(), json!(curve.min_r()));
    summary.insert(
        "asymptotes".into(),
        Value::Array(curve.asymptotes.iter().map(|a| json!({ "omega": a.omega, "r": a.r })).collect()),
    );
    if let Some(r) = r {
        let params = ModelParams::new(r, k, d)?;
        let scan = ScanOptions::default();
        summary.insert("r".into(), json!(r));
        summary.insert("crossings".into(), crossings_json(&hopf_points(&params, kernel, &scan)?));
    }
    Ok((table, summary))
}

fn region_table(path: &str, cfg: &RunConfig) -> Result<Table, CliError> {
    let (r_lo, r_hi) = cfg.require_r_range()?;
    let (t_lo, t_hi) = cfg.require_tau_range()?;
    let n = cfg.points.unwrap_or(41);
    let mut t = Table::new(path, &["r", "tau_m", "state"]);
    for i in 0..n {
        let r = r_lo + (r_hi - r_lo) * i as f64 / (n - 1) as f64;
        let params = ModelParams::new(r, cfg.k, cfg.d)?;
        for j in 0..n {
            let tau = t_lo + (t_hi - t_lo) * j as f64 / (n - 1) as f64;
            let v = classify(&params, cfg.kernel, tau)?;
            let state = match v.state {
                crate::stability::StabilityState::Stable => "stable",
                crate::stability::StabilityState::Unstable => "unstable",
            };
            t.push(vec![r.into(), tau.into(), state.into()]);
        }
    }
    Ok(t)
}

pub(crate) fn trajectory_table(path: &str, traj: &Trajectory) -> Table {
    let mut t = Table::new(path, &["t", "n", "delayed"]);
    for i in 0..traj.len() {
        t.push(vec![traj.times[i].into(), traj.values[i].into(), traj.delayed[i].into()]);
    }
    t
}

pub(crate) fn bifurcation_table(path: &str, result: &SweepResult) -> Table {
    let mut t = Table::new(path, &["tau_m", "n_min", "n_max", "oscillating"]);
    for row in &result.rows {
        t.push(vec![row.tau_m.into(), row.n_min.into(), row.n_max.into(), row.oscillating.into()]);
    }
    t
}

/// Transitions from the sweep next to the analytical crossings at the
/// same growth rate.
pub(crate) fn sweep_summary(params: &ModelParams, kernel: Kernel, result: &SweepResult) -> Result<Map<String, Value>, CliError> {
    let mut m = Map::new();
    m.insert(
        "transitions".into(),
        Value::Array(result.transitions.iter().map(|t| json!({ "tau_m": t.tau_m, "kind": t.kind })).collect()),
    );
    let failed: Vec<Value> = result
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| json!({ "tau_m": r.tau_m, "error": e })))
        .collect();
    m.insert("failed_rows".into(), Value::Array(failed));
    let analytic = hopf_points(params, kernel, &ScanOptions::default())?;
    m.insert("analytic_crossings".into(), crossings_json(&analytic));
    Ok(m)
}

pub(crate) fn phase_table(
    path: &str,
    params: &ModelParams,
    kernel: Kernel,
    tau: f64,
    sim: &SimConfig,
) -> Result<(Table, Map<String, Value>), CliError> {
    let traj = simulate(params, kernel, tau, sim)?;
    let portrait = phase_portrait(&traj, &PhaseOptions::new(sim.transient_time()));
    let mut t = Table::new(path, &["t", "n", "delayed"]);
    for i in 0..portrait.n.len() {
        t.push(vec![portrait.times[i].into(), portrait.n[i].into(), portrait.delayed[i].into()]);
    }
    let mut m = Map::new();
    m.insert("limit_cycle".into(), json!(portrait.limit_cycle));
    m.insert("amplitude".into(), json!(portrait.amplitude));
    m.insert("cycles".into(), json!(portrait.cycles));
    m.insert("cycle_gap".into(), json!(portrait.cycle_gap));
    m.insert("n_star".into(), json!(params.equilibrium()));
    Ok((t, m))
}

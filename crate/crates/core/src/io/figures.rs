use serde_json::{json, Map, Value};

use super::commands::{
    bifurcation_table, hopf_curve_table, phase_table, sweep_summary, thresholds_json, transform_table,
    Report,
};
use super::config::FigureId;
use super::format::Table;
use super::CliError;
use crate::model::{transforms, Kernel, ModelParams};
use crate::simulate::{bifurcation_sweep, SimConfig, SweepConfig};
use crate::stability::gamma2_omega_pm;

const K: f64 = 5.0;
const D: f64 = 3.0;
const SIGMAS: [f64; 5] = [0.2, 0.5, 1.0, 1.5, 1.9];

struct Sweep {
    r: f64,
    kernel: Kernel,
    range: (f64, f64),
    points: usize,
    horizon: f64,
    step_fraction: Option<f64>,
}

impl Sweep {
    fn run(&self, table: &str) -> Result<(Table, Map<String, Value>), CliError> {
        let params = ModelParams::new(self.r, K, D)?;
        let config = SweepConfig {
            sim: SimConfig::new(100.0),
            horizon: self.horizon,
            step_fraction: self.step_fraction,
            max_doublings: 3,
        };
        let result = bifurcation_sweep(&params, self.kernel, self.range, self.points, &config)?;
        let mut summary = sweep_summary(&params, self.kernel, &result)?;
        summary.insert("r".into(), json!(self.r));
        Ok((bifurcation_table(table, &result), summary))
    }
}

fn phase_runs(
    prefix: &str,
    r: f64,
    kernel: Kernel,
    taus: &[f64],
    tables: &mut Vec<Table>,
) -> Result<Value, CliError> {
    let params = ModelParams::new(r, K, D)?;
    let mut out = Vec::new();
    for &tau in taus {
        let mut sim = SimConfig::new(300.0_f64.max(150.0 * tau));
        sim.record_stride = 10;
        let (table, mut summary) = phase_table(&format!("{prefix}_tau_{tau}.csv"), &params, kernel, tau, &sim)?;
        summary.insert("tau_m".into(), json!(tau));
        tables.push(table);
        out.push(Value::Object(summary));
    }
    Ok(Value::Array(out))
}

/// Datasets behind one preset figure, all with `K = 5`, `D = 3`; table
/// paths are prefixed with the figure id.
pub fn reproduce_figure(id: FigureId) -> Result<Report, CliError> {
    let mut tables = Vec::new();
    let mut summary = Map::new();
    summary.insert("command".into(), json!("reproduce-figure"));
    summary.insert("figure".into(), json!(id.to_string()));
    summary.insert("params".into(), json!({ "K": K, "D": D }));
    summary.insert("thresholds".into(), thresholds_json(K, D));
    let dir = id.to_string();
    match id {
        FigureId::Fig3 => {
            let mut curves = Vec::new();
            for sigma in SIGMAS {
                let kernel = Kernel::uniform(sigma)?;
                let omega_max = 2.0 * std::f64::consts::PI;
                tables.push(transform_table(&format!("{dir}/transforms_sigma_{sigma}.csv"), kernel, omega_max, 629)?);
                let (t, mut s) = hopf_curve_table(&format!("{dir}/hopf_sigma_{sigma}.csv"), kernel, K, D, Some(2.0))?;
                tables.push(t);
                s.insert("sigma".into(), json!(sigma));
                curves.push(Value::Object(s));
            }
            summary.insert("curves".into(), Value::Array(curves));
        }
        FigureId::Fig4 => {
            let kernel = Kernel::Uniform { sigma: 1.0 };
            let (t, s) = hopf_curve_table(&format!("{dir}/hopf.csv"), kernel, K, D, Some(2.0))?;
            tables.push(t);
            summary.insert("hopf".into(), Value::Object(s));
            let sweep = Sweep {
                r: 2.0,
                kernel,
                range: (0.5, 1.2),
                points: 71,
                horizon: 400.0,
                step_fraction: None,
            };
            let (t, s) = sweep.run(&format!("{dir}/bifurcation.csv"))?;
            tables.push(t);
            summary.insert("bifurcation".into(), Value::Object(s));
            let phases = phase_runs(&format!("{dir}/phase"), 2.0, kernel, &[0.83, 0.85, 0.86], &mut tables)?;
            summary.insert("phase".into(), phases);
        }
        FigureId::Fig5 => {
            let kernel = Kernel::Gamma { p: 2 };
            tables.push(transform_table(&format!("{dir}/transforms.csv"), kernel, 20.0, 2001)?);
            let tr = transforms(kernel)?;
            let mut levels = Table::new(format!("{dir}/levels.csv"), &["r", "level", "omega_minus", "omega_plus"]);
            for r in [3.0, 3.675, 5.0, 8.0, 15.0] {
                let n = ModelParams::new(r, K, D)?.equilibrium();
                let (lo, hi) = gamma2_omega_pm(K, n).unwrap_or((f64::NAN, f64::NAN));
                debug_assert!(lo.is_nan() || (tr.c(lo) - (K / n - 1.0)).abs() < 1e-9);
                levels.push(vec![r.into(), (K / n - 1.0).into(), lo.into(), hi.into()]);
            }
            tables.push(levels);
        }
        FigureId::Fig6 => {
            let kernel = Kernel::Gamma { p: 2 };
            let (t, s) = hopf_curve_table(&format!("{dir}/hopf.csv"), kernel, K, D, Some(5.0))?;
            tables.push(t);
            summary.insert("hopf".into(), Value::Object(s));
            let sweep = Sweep {
                r: 5.0,
                kernel,
                range: (0.5, 12.0),
                points: 461,
                horizon: 1000.0,
                step_fraction: Some(2e-3),
            };
            let (t, s) = sweep.run(&format!("{dir}/bifurcation.csv"))?;
            tables.push(t);
            summary.insert("bifurcation".into(), Value::Object(s));
            let phases = phase_runs(&format!("{dir}/phase"), 5.0, kernel, &[0.5, 5.0, 11.0], &mut tables)?;
            summary.insert("phase".into(), phases);
        }
        FigureId::Fig7 => {
            let kernel = Kernel::Gamma { p: 3 };
            let (t, s) = hopf_curve_table(&format!("{dir}/hopf.csv"), kernel, K, D, None)?;
            tables.push(t);
            summary.insert("hopf".into(), Value::Object(s));
            let mut sweeps = Vec::new();
            for (r, range, points) in [(1.8, (1.0, 22.0), 211), (4.0, (0.2, 3.0), 57)] {
                let sweep = Sweep {
                    r,
                    kernel,
                    range,
                    points,
                    horizon: 1000.0,
                    step_fraction: Some(2e-3),
                };
                let (t, s) = sweep.run(&format!("{dir}/bifurcation_r_{r}.csv"))?;
                tables.push(t);
                sweeps.push(Value::Object(s));
            }
            summary.insert("bifurcation".into(), Value::Array(sweeps));
        }
    }
    Ok(Report {
        summary: Value::Object(summary),
        tables,
    })
}

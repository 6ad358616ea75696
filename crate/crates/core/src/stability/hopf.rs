use num_complex::Complex64;
use serde::Serialize;

use super::roots::{bisect, scan_roots, ScanOptions};
use super::{Crossing, HopfPoint};
use crate::error::{Error, Result};
use crate::model::{characteristic, rate_for_equilibrium, transforms, Kernel, KernelTransforms, ModelParams, TransformPoint};

/// Points within this distance (in omega) of a place where `S` vanishes
/// are not admissible: the delay diverges there.
const EDGE_MARGIN: f64 = 1e-8;
const DEGENERATE_TOL: f64 = 1e-10;
const ON_CURVE_TOL: f64 = 1e-9;

/// A root of `C` with the slope of `C` there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootFrequency {
    pub omega: f64,
    pub dc: f64,
}

/// Roots of `C` on the scan window, and the smallest one at which roots
/// move into the right half plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct D0Crossings {
    pub roots: Vec<RootFrequency>,
    pub omega0: Option<f64>,
}

pub fn crossing_frequencies_d0(kernel: Kernel) -> Result<D0Crossings> {
    crossing_frequencies_d0_with(kernel, &ScanOptions::default())
}

pub fn crossing_frequencies_d0_with(kernel: Kernel, opts: &ScanOptions) -> Result<D0Crossings> {
    let tr = transforms(kernel)?;
    let roots: Vec<RootFrequency> = scan_roots(|w| tr.c(w), opts)
        .into_iter()
        .map(|omega| RootFrequency { omega, dc: tr.dc(omega) })
        .collect();
    let omega0 = roots
        .iter()
        .find(|root| root.dc < 0.0 && sine_admissible(&tr, root.omega))
        .map(|root| root.omega);
    Ok(D0Crossings { roots, omega0 })
}

/// First Hopf delay without inflow, `tau* = w0 / (r S(w0))`; `None` when
/// the equilibrium is stable for every delay.
pub fn hopf_delay_d0(kernel: Kernel, r: f64) -> Result<Option<f64>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("r", format!("must be finite and > 0, got {r}")));
    }
    let tr = transforms(kernel)?;
    let found = crossing_frequencies_d0(kernel)?;
    Ok(found.omega0.map(|w| w / (r * tr.s(w))))
}

/// `S > 0` with no zero of `S` (simple or touching) within the margin.
fn sine_admissible(tr: &KernelTransforms, omega: f64) -> bool {
    let s = tr.s(omega);
    s > 1e-12
        && s > EDGE_MARGIN * tr.ds(omega).abs()
        && tr.s(omega - EDGE_MARGIN) > 0.0
        && tr.s(omega + EDGE_MARGIN) > 0.0
}

/// Derivative of `tau_m(w) = -K w C(w) / (r (n* - K) S(w))` with `r` and
/// `n*` held fixed. Requires `n* > K`.
pub fn tau_slope(tp: &TransformPoint, r: f64, k: f64, n: f64) -> f64 {
    let w = tp.omega;
    let inner = tp.c + w * (tp.dc * tp.s - tp.c * tp.ds) / tp.s;
    -k / (r * (n - k) * tp.s) * inner
}

/// `Re (d lambda / d tau_m)^{-1}` at a crossing `i w`; its sign is the
/// crossing direction.
pub fn transversality_value(tp: &TransformPoint, r: f64, k: f64, n: f64, tau: f64) -> f64 {
    let lead = r * (n - k) + r * n * tp.c;
    let q2 = lead * lead + (r * n * tp.s).powi(2);
    if n > k {
        let w = tp.omega;
        let bracket = r * tau * n * tp.ds - k + (k * w / tau) * tau_slope(tp, r, k, n);
        r * (n - k) / q2 * bracket
    } else {
        general_transversality(tp, r, k, n, tau, q2)
    }
}

/// Same quantity before substituting the crossing conditions; valid for
/// `D = 0` where `n* = K`.
fn general_transversality(tp: &TransformPoint, r: f64, k: f64, n: f64, tau: f64, q2: f64) -> f64 {
    let first = (n - k) * (k - r * tau * n * tp.ds);
    let second = k * n * (tp.c + r * tau * n / k * (tp.dc * tp.s - tp.c * tp.ds));
    -r * (first + second) / q2
}

fn classify_crossing(value: f64, omega: f64) -> Result<Crossing> {
    if !value.is_finite() || value.abs() < DEGENERATE_TOL {
        return Err(Error::Degenerate { omega, value });
    }
    Ok(if value > 0.0 {
        Crossing::LeftToRight
    } else {
        Crossing::RightToLeft
    })
}

/// Direction of the crossing at `(omega, r, tau_m)`, which must satisfy
/// both imaginary-axis equations.
pub fn transversality_dpos(kernel: Kernel, k: f64, d: f64, omega: f64, r: f64, tau_m: f64) -> Result<Crossing> {
    let params = ModelParams::new(r, k, d)?;
    let tr = transforms(kernel)?;
    let tp = tr.at(omega)?;
    let n = params.equilibrium();
    let residual = (tp.c - (k / n - 1.0))
        .abs()
        .max((tp.s - omega * k / (tau_m * r * n)).abs());
    if !(residual <= ON_CURVE_TOL) {
        return Err(Error::OffCurve { omega, residual });
    }
    classify_crossing(transversality_value(&tp, r, k, n, tau_m), omega)
}

/// All imaginary-axis crossings for fixed `(r, K, D)`, ordered by delay.
/// Tangential crossings are left out.
pub fn hopf_points(params: &ModelParams, kernel: Kernel, scan: &ScanOptions) -> Result<Vec<HopfPoint>> {
    let tr = transforms(kernel)?;
    let n = params.equilibrium();
    let (r, k) = (params.r(), params.k());
    let target = k / n - 1.0;
    let mut points: Vec<HopfPoint> = scan_roots(|w| tr.c(w) - target, scan)
        .into_iter()
        .filter(|&w| sine_admissible(&tr, w))
        .filter_map(|omega| {
            let tp = tr.at(omega).ok()?;
            let tau_m = omega * k / (r * n * tp.s);
            let crossing = classify_crossing(transversality_value(&tp, r, k, n, tau_m), omega).ok()?;
            Some(HopfPoint { omega, r, tau_m, crossing })
        })
        .collect();
    points.sort_by(|a, b| a.tau_m.total_cmp(&b.tau_m));
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveOptions {
    /// Window used to locate band edges.
    pub scan: ScanOptions,
    /// Spacing of emitted curve points in omega.
    pub omega_step: f64,
    /// Points with larger delay are dropped (near vertical asymptotes).
    pub tau_max: f64,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self {
            scan: ScanOptions::default(),
            omega_step: 1e-2,
            tau_max: 1e6,
        }
    }
}

/// Band edge where `S -> 0` with `C` still admissible: the delay diverges
/// and the curve approaches the vertical line `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptote {
    pub omega: f64,
    pub r: f64,
}

/// Hopf bifurcation curve in the `(r, tau_m)` plane for fixed `K`, `D > 0`,
/// parametrized by the crossing frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfCurve {
    pub kernel: Kernel,
    pub k: f64,
    pub d: f64,
    pub points: Vec<HopfPoint>,
    /// Half-open index ranges into `points`, one per admissible band.
    pub branches: Vec<(usize, usize)>,
    pub asymptotes: Vec<Asymptote>,
}

struct Parametrization {
    tr: KernelTransforms,
    k: f64,
    d: f64,
}

impl Parametrization {
    /// `(n*, r, tau_m)` on the curve at `omega`, if admissible.
    fn at(&self, omega: f64) -> Option<(f64, f64, f64)> {
        let c = self.tr.c(omega);
        let s = self.tr.s(omega);
        if !(c > -1.0 && c < 0.0 && s > 0.0) {
            return None;
        }
        let n = self.k / (1.0 + c);
        let r = rate_for_equilibrium(self.k, self.d, n);
        let tau = omega * self.k / (r * n * s);
        Some((n, r, tau))
    }

    fn point(&self, omega: f64) -> Option<HopfPoint> {
        let (n, r, tau_m) = self.at(omega)?;
        let tp = self.tr.at(omega).ok()?;
        let crossing = classify_crossing(transversality_value(&tp, r, self.k, n, tau_m), omega).ok()?;
        Some(HopfPoint { omega, r, tau_m, crossing })
    }
}

pub fn hopf_curve_dpos(kernel: Kernel, k: f64, d: f64) -> Result<HopfCurve> {
    hopf_curve_dpos_with(kernel, k, d, &CurveOptions::default())
}

pub fn hopf_curve_dpos_with(kernel: Kernel, k: f64, d: f64, opts: &CurveOptions) -> Result<HopfCurve> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::invalid("D", format!("Hopf curve needs D > 0, got {d}")));
    }
    // validates K as a side effect
    ModelParams::new(1.0, k, d)?;
    let tr = transforms(kernel)?;
    let param = Parametrization { tr, k, d };

    let mut edges: Vec<f64> = scan_roots(|w| tr.c(w), &opts.scan);
    edges.extend(scan_roots(|w| tr.c(w) + 1.0, &opts.scan));
    let sine_roots = scan_roots(|w| tr.s(w), &opts.scan);
    edges.extend(&sine_roots);
    edges.sort_by(f64::total_cmp);

    let asymptotes = sine_roots
        .iter()
        .filter_map(|&w| {
            let c = tr.c(w);
            (c > -1.0 && c < 0.0).then(|| Asymptote {
                omega: w,
                r: rate_for_equilibrium(k, d, k / (1.0 + c)),
            })
        })
        .collect();

    let near_edge = |w: f64| {
        let i = edges.partition_point(|&e| e < w);
        let below = i.checked_sub(1).map(|j| w - edges[j]).unwrap_or(f64::INFINITY);
        let above = edges.get(i).map(|&e| e - w).unwrap_or(f64::INFINITY);
        below.min(above) <= EDGE_MARGIN
    };

    let n_grid = ((opts.scan.omega_max - opts.scan.omega_min) / opts.omega_step).floor() as usize;
    let mut points = Vec::new();
    let mut branches = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..=n_grid {
        let omega = opts.scan.omega_min + i as f64 * opts.omega_step;
        let point = if near_edge(omega) { None } else { param.point(omega) };
        let point = point.filter(|p| p.tau_m <= opts.tau_max && on_curve(kernel, k, d, p));
        match point {
            Some(p) => {
                start.get_or_insert(points.len());
                points.push(p);
            }
            None => {
                if let Some(s) = start.take() {
                    branches.push((s, points.len()));
                }
            }
        }
    }
    if let Some(s) = start {
        branches.push((s, points.len()));
    }
    Ok(HopfCurve { kernel, k, d, points, branches, asymptotes })
}

fn on_curve(kernel: Kernel, k: f64, d: f64, p: &HopfPoint) -> bool {
    let Ok(params) = ModelParams::new(p.r, k, d) else {
        return false;
    };
    characteristic(&params, kernel, p.tau_m, Complex64::new(0.0, p.omega))
        .map(|pt| pt.delta.norm() <= ON_CURVE_TOL)
        .unwrap_or(false)
}

impl HopfCurve {
    /// Intersections of the curve with the vertical line at `r`, refined
    /// by bisection in omega and ordered by delay.
    pub fn crossings_at_r(&self, r: f64) -> Vec<HopfPoint> {
        let tr = match transforms(self.kernel) {
            Ok(tr) => tr,
            Err(_) => return Vec::new(),
        };
        let param = Parametrization { tr, k: self.k, d: self.d };
        let gap = |w: f64| param.at(w).map(|(_, rate, _)| rate - r).unwrap_or(f64::NAN);
        let mut out = Vec::new();
        for &(s, e) in &self.branches {
            for pair in self.points[s..e].windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let (fa, fb) = (a.r - r, b.r - r);
                if fa == 0.0 {
                    out.push(a);
                } else if fa.signum() != fb.signum() && fb != 0.0 {
                    let w = bisect(&gap, a.omega, b.omega, fa, 1e-13);
                    if let Some(p) = param.point(w) {
                        out.push(p);
                    }
                }
            }
            if e > s && self.points[e - 1].r == r {
                out.push(self.points[e - 1]);
            }
        }
        out.sort_by(|a, b| a.tau_m.total_cmp(&b.tau_m));
        out
    }

    /// Smallest growth rate reached by the sampled curve.
    pub fn min_r(&self) -> Option<f64> {
        self.points.iter().map(|p| p.r).min_by(f64::total_cmp)
    }
}

/// Closed-form crossing frequencies for the order-2 gamma kernel at a
/// given equilibrium; `None` when `C(w) = K/n* - 1` has no solution.
pub fn gamma2_omega_pm(k: f64, n: f64) -> Option<(f64, f64)> {
    let m = n - k;
    if m <= 0.0 {
        return None;
    }
    let inner = n * (8.0 * k - 7.0 * n) / (m * m);
    if inner < 0.0 {
        return None;
    }
    let base = 2.0 * n / m - 4.0;
    let minus = base - 2.0 * inner.sqrt();
    let plus = base + 2.0 * inner.sqrt();
    (minus > 0.0).then(|| (minus.sqrt(), plus.sqrt()))
}

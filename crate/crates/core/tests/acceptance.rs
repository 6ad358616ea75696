//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! for its criterion, followed by the individual measurements.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use delay_logistic::model::{gamma_density, gamma_tail, transforms};
use delay_logistic::simulate::{
    bifurcation_sweep, simulate, simulate_gamma_chain, simulate_gamma_direct, SimConfig, SweepConfig,
    Trajectory, TransitionKind,
};
use delay_logistic::stability::{
    classify, gamma_d0_rate_factor, gamma_eigen_oracle, hopf_curve_dpos, hopf_delay_d0, GammaThresholds,
    StabilityState,
};
use delay_logistic::{Kernel, ModelParams};

const K: f64 = 5.0;
const D: f64 = 3.0;

/// Collects named sub-checks and reports them under one criterion line.
struct Criterion {
    name: &'static str,
    started: Instant,
    checks: Vec<(bool, String)>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            started: Instant::now(),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl Into<String>) {
        self.checks.push((ok, detail.into()));
    }

    fn near(&mut self, label: &str, got: f64, want: f64, tol: f64) {
        let ok = (got - want).abs() <= tol;
        self.check(ok, format!("{label}: got {got:.6}, want {want} ± {tol}"));
    }

    fn runtime(&mut self, limit: Duration) {
        let took = self.started.elapsed();
        self.check(took < limit, format!("runtime {:.1?} (limit {limit:?})", took));
    }

    fn finish(self) {
        let ok = self.checks.iter().all(|(ok, _)| *ok);
        let mut report = format!("\n{} {}\n", if ok { "PASS" } else { "FAIL" }, self.name);
        for (pass, detail) in &self.checks {
            report += &format!("    [{}] {detail}\n", if *pass { "ok" } else { "x" });
        }
        // written past the test harness capture so passing criteria are reported too
        std::io::stdout().lock().write_all(report.as_bytes()).unwrap();
        assert!(ok, "criterion failed: {}", self.name);
    }
}

fn crossings(kernel: Kernel, r: f64) -> Vec<f64> {
    hopf_curve_dpos(kernel, K, D)
        .unwrap()
        .crossings_at_r(r)
        .into_iter()
        .map(|p| p.tau_m)
        .collect()
}

fn sweep_config(horizon: f64, step_fraction: Option<f64>) -> SweepConfig {
    SweepConfig {
        sim: SimConfig::new(100.0),
        horizon,
        step_fraction,
        max_doublings: 3,
    }
}

#[test]
fn uniform_kernel_hopf_onset() {
    let mut c = Criterion::new("uniform kernel sigma=1, r=2: Hopf onset");
    let kernel = Kernel::uniform(1.0).unwrap();
    let taus = crossings(kernel, 2.0);
    c.check(!taus.is_empty(), format!("analytic crossings {taus:?}"));
    let analytic = taus.first().copied().unwrap_or(f64::NAN);
    c.near("analytic tau*", analytic, 0.849, 0.005);

    let params = ModelParams::new(2.0, K, D).unwrap();
    let sweep = bifurcation_sweep(&params, kernel, (0.5, 1.2), 71, &sweep_config(400.0, None)).unwrap();
    let onset = sweep.first(TransitionKind::Onset).unwrap_or(f64::NAN);
    c.near("simulated onset", onset, 0.849, 0.02);
    c.runtime(Duration::from_secs(30));
    c.finish();
}

#[test]
fn gamma2_stability_switching() {
    let mut c = Criterion::new("gamma p=2, r=5: stability switching window");
    let kernel = Kernel::gamma(2).unwrap();
    let taus = crossings(kernel, 5.0);
    c.check(taus.len() == 2, format!("analytic crossings {taus:?}"));
    let (t1, t2) = (
        taus.first().copied().unwrap_or(f64::NAN),
        taus.get(1).copied().unwrap_or(f64::NAN),
    );
    c.near("analytic tau1*", t1, 1.349, 0.005);
    c.near("analytic tau2*", t2, 10.177, 0.01);

    let params = ModelParams::new(5.0, K, D).unwrap();
    let sweep = bifurcation_sweep(&params, kernel, (0.5, 12.0), 461, &sweep_config(1000.0, Some(2e-3))).unwrap();
    let onset = sweep.first(TransitionKind::Onset).unwrap_or(f64::NAN);
    let offset = sweep.first(TransitionKind::Offset).unwrap_or(f64::NAN);
    c.near("simulated onset", onset, 1.349, 0.05);
    c.near("simulated offset", offset, 10.177, 0.05);
    c.runtime(Duration::from_secs(120));
    c.finish();
}

#[test]
fn gamma3_two_regimes() {
    let mut c = Criterion::new("gamma p=3: two regimes and existence thresholds");
    let kernel = Kernel::gamma(3).unwrap();

    let low = crossings(kernel, 1.8);
    c.check(low.len() == 2, format!("r=1.8 crossings {low:?}"));
    c.near("r=1.8 tau1*", low.first().copied().unwrap_or(f64::NAN), 2.46, 0.01);
    c.near("r=1.8 tau2*", low.get(1).copied().unwrap_or(f64::NAN), 19.77, 0.05);

    let high = crossings(kernel, 4.0);
    c.check(high.len() == 1, format!("r=4 crossings {high:?}"));
    c.near("r=4 tau*", high.first().copied().unwrap_or(f64::NAN), 0.86, 0.01);

    let th = GammaThresholds::new(K, D);
    c.near("lower threshold", th.r_lower, 1.35, 1e-9);
    c.near("upper threshold", th.r_upper, 3.675, 1e-9);
    let curve = hopf_curve_dpos(kernel, K, D).unwrap();
    let asymptote = curve.asymptotes.first().map(|a| a.r).unwrap_or(f64::NAN);
    c.near("curve asymptote", asymptote, 3.675, 1e-9);
    let below = crossings(kernel, th.r_lower - 1e-6).len();
    let above = crossings(kernel, th.r_lower + 1e-6).len();
    c.check(below == 0 && above == 2, format!("crossings just below/above lower threshold: {below}/{above}"));
    c.finish();
}

#[test]
fn closed_forms_without_inflow() {
    let mut c = Criterion::new("closed-form Hopf delays with D=0");
    let rates = [0.5, 2.0, 5.0];
    for r in rates {
        let got = hopf_delay_d0(Kernel::Dirac, r).unwrap().unwrap_or(f64::NAN);
        c.near(&format!("dirac r={r}"), got, PI / (2.0 * r), 1e-10);
    }
    for sigma in [0.2, 1.0, 1.9] {
        for r in rates {
            let want = PI * PI * sigma / (8.0 * r * (sigma * PI / 4.0).sin());
            let got = hopf_delay_d0(Kernel::uniform(sigma).unwrap(), r).unwrap().unwrap_or(f64::NAN);
            c.near(&format!("uniform sigma={sigma} r={r}"), got, want, 1e-10);
        }
    }
    for (p, reduced) in [(2, 2.0), (3, 8.0 / 9.0)] {
        let half = PI / (2.0 * p as f64);
        let factor = half.tan() / half.cos().powi(p as i32);
        c.near(&format!("gamma p={p} rate factor"), gamma_d0_rate_factor(p), factor, 1e-10);
        c.near(&format!("gamma p={p} reduced factor"), factor, reduced, 1e-10);
        for r in rates {
            // stable iff r < factor * p / tau_m
            let got = hopf_delay_d0(Kernel::gamma(p).unwrap(), r).unwrap().unwrap_or(f64::NAN);
            c.near(&format!("gamma p={p} r={r}"), got, factor * p as f64 / r, 1e-10);
        }
    }
    c.finish();
}

#[test]
fn classification_matches_eigen_oracle() {
    let mut c = Criterion::new("classify agrees with eigenvalue oracle on gamma p=1,2,3");
    for p in 1..=3 {
        let kernel = Kernel::gamma(p).unwrap();
        let curve = hopf_curve_dpos(kernel, K, D).unwrap();
        let (mut agree, mut total, mut skipped) = (0, 0, 0);
        let mut mismatches = Vec::new();
        for i in 1..=20 {
            let r = 0.3 * i as f64;
            let params = ModelParams::new(r, K, D).unwrap();
            let hopf: Vec<f64> = curve.crossings_at_r(r).iter().map(|h| h.tau_m).collect();
            for j in 1..=20 {
                let tau = 0.6 * j as f64;
                if hopf.iter().any(|h| (h - tau).abs() < 1e-2) {
                    skipped += 1;
                    continue;
                }
                total += 1;
                let verdict = classify(&params, kernel, tau).unwrap();
                let growing = gamma_eigen_oracle(&params, p, tau).unwrap() > 0.0;
                if (verdict.state == StabilityState::Unstable) == growing {
                    agree += 1;
                } else {
                    mismatches.push((r, tau));
                }
            }
        }
        c.check(
            agree == total,
            format!("p={p}: {agree}/{total} agree, {skipped} near a Hopf curve, mismatches {mismatches:?}"),
        );
    }
    c.finish();
}

#[test]
fn linear_chain_matches_direct_convolution() {
    let mut c = Criterion::new("gamma linear chain vs direct convolution on [0, 30]");
    let points: [(u32, f64, f64); 6] = [
        (1, 5.0, 2.0),
        (2, 5.0, 0.8),
        (2, 5.0, 5.0),
        (3, 1.8, 1.5),
        (3, 1.8, 8.0),
        (3, 4.0, 2.0),
    ];
    for (p, r, tau) in points {
        let params = ModelParams::new(r, K, D).unwrap();
        let config = SimConfig::new(30.0);
        let chain = simulate_gamma_chain(&params, p, tau, &config).unwrap();
        let direct = simulate_gamma_direct(&params, p, tau, &config).unwrap();
        let gap = chain.sup_distance(&direct);
        c.check(gap <= 1e-3, format!("p={p} r={r} tau={tau}: sup gap {gap:.3e} (limit 1e-3)"));
    }
    c.finish();
}

/// Adaptive double-exponential quadrature of `∫ f(s) g(s) ds` against the
/// normalized gamma density, in pieces shorter than half a period.
fn gamma_moment(p: u32, omega: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut end = 1.0;
    while gamma_tail(p, p as f64 * end) > 1e-14 {
        end += 1.0;
    }
    let piece = if omega > 0.0 { (PI / omega).min(1.0) } else { 1.0 };
    let mut total = 0.0;
    let mut a = 0.0;
    while a < end {
        let b = (a + piece).min(end);
        total += quadrature::integrate(|s| f(s) * gamma_density(p, p as f64, s), a, b, 1e-13).integral;
        a = b;
    }
    total
}

#[test]
fn transform_properties() {
    let mut c = Criterion::new("kernel transform property suite");
    let mut kernels = vec![Kernel::Dirac];
    kernels.extend([0.2, 1.0, 1.9].map(|s| Kernel::uniform(s).unwrap()));
    kernels.extend((1..=4).map(|p| Kernel::gamma(p).unwrap()));
    let h = 1e-4;
    for kernel in kernels {
        let tr = transforms(kernel).unwrap();
        let at0 = tr.at(0.0).unwrap();
        c.check(
            at0.c == 1.0 && at0.s == 0.0 && (at0.ds - 1.0).abs() < 1e-12,
            format!("{kernel:?}: C(0)={}, S(0)={}, S'(0)={}", at0.c, at0.s, at0.ds),
        );
        let (mut modulus, mut fd) = (0.0_f64, 0.0_f64);
        for i in 0..=20_000 {
            let w = i as f64 * 1e-3;
            modulus = modulus.max(tr.c(w).powi(2) + tr.s(w).powi(2));
            if i > 0 && i % 10 == 0 {
                let dc = (tr.c(w + h) - tr.c(w - h)) / (2.0 * h);
                let ds = (tr.s(w + h) - tr.s(w - h)) / (2.0 * h);
                fd = fd.max((dc - tr.dc(w)).abs()).max((ds - tr.ds(w)).abs());
            }
        }
        c.check(modulus <= 1.0 + 1e-12, format!("{kernel:?}: max C^2+S^2 = {modulus:.15}"));
        c.check(fd <= 1e-6, format!("{kernel:?}: derivative vs finite difference {fd:.2e}"));
    }
    for p in 1..=4 {
        let tr = transforms(Kernel::gamma(p).unwrap()).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..=200 {
            let w = i as f64 * 0.1;
            let qc = gamma_moment(p, w, |s| (w * s).cos());
            let qs = gamma_moment(p, w, |s| (w * s).sin());
            worst = worst.max((qc - tr.c(w)).abs()).max((qs - tr.s(w)).abs());
        }
        c.check(worst <= 1e-7, format!("gamma p={p}: closed form vs quadrature {worst:.2e}"));
    }
    c.runtime(Duration::from_secs(60));
    c.finish();
}

/// Observed order from three runs at steps `h`, `h/2`, `h/4`, compared on
/// the coarse grid.
fn observed_order(run: impl Fn(f64) -> Trajectory, h: f64) -> f64 {
    let runs = [run(h), run(h / 2.0), run(h / 4.0)];
    let gap = |fine: &Trajectory, factor: usize| {
        runs[0]
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (v - fine.values[i * factor]).abs())
            .fold(0.0, f64::max)
    };
    let coarse = gap(&runs[1], 2);
    // fine-pair difference measured on the same coarse grid
    let fine = runs[1]
        .values
        .iter()
        .step_by(2)
        .enumerate()
        .map(|(i, v)| (v - runs[2].values[i * 4]).abs())
        .fold(0.0, f64::max);
    (coarse / fine).log2()
}

#[test]
fn positivity_and_convergence() {
    let mut c = Criterion::new("positivity and integrator convergence order");
    let kernels = [
        Kernel::Dirac,
        Kernel::uniform(1.0).unwrap(),
        Kernel::uniform(1.9).unwrap(),
        Kernel::gamma(1).unwrap(),
        Kernel::gamma(2).unwrap(),
        Kernel::gamma(3).unwrap(),
    ];
    let mut runs = 0;
    let mut lowest = f64::INFINITY;
    for kernel in kernels {
        for (r, d) in [(0.5, 0.0), (2.0, 0.0), (5.0, 3.0), (8.0, 0.5)] {
            let params = ModelParams::new(r, K, d).unwrap();
            for tau in [0.0, 0.5, 1.0, 2.0, 6.0] {
                if r * tau > 4.0 {
                    // relaxation swings make the fixed explicit step unstable beyond this
                    continue;
                }
                for n0 in [1e-3, 2.0, 20.0] {
                    let config = SimConfig::new(60.0).with_history(n0);
                    let traj = simulate(&params, kernel, tau, &config)
                        .unwrap_or_else(|e| panic!("{kernel:?} r={r} D={d} tau={tau} n0={n0}: {e}"));
                    lowest = lowest.min(traj.values.iter().copied().fold(f64::INFINITY, f64::min));
                    runs += 1;
                }
            }
        }
    }
    c.check(lowest > 0.0, format!("{runs} runs, smallest value {lowest:.3e}"));

    let params = ModelParams::new(2.0, K, D).unwrap();
    let cases = [
        ("dirac", Kernel::Dirac, 1.0),
        ("uniform sigma=1", Kernel::uniform(1.0).unwrap(), 1.0),
        ("gamma p=3 chain", Kernel::gamma(3).unwrap(), 3.0),
    ];
    for (label, kernel, tau) in cases {
        let order = observed_order(
            |h| simulate(&params, kernel, tau, &SimConfig::new(20.0).with_step(h)).unwrap(),
            0.04,
        );
        c.check(order >= 3.5, format!("{label}: observed order {order:.2} (need >= 3.5)"));
    }
    c.finish();
}

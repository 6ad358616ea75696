use delay_logistic::simulate::{settle, simulate, SimConfig};
use delay_logistic::stability::{hopf_curve_dpos, hopf_delay_d0};
use delay_logistic::{Kernel, ModelParams};

const TOL: f64 = 1e-4;

fn first_hopf(params: &ModelParams, kernel: Kernel) -> f64 {
    if params.d() == 0.0 {
        return hopf_delay_d0(kernel, params.r()).unwrap().expect("no Hopf point");
    }
    let curve = hopf_curve_dpos(kernel, params.k(), params.d()).unwrap();
    curve.crossings_at_r(params.r()).first().expect("no Hopf point").tau_m
}

fn amplitude(params: &ModelParams, kernel: Kernel, tau: f64) -> f64 {
    let config = SimConfig::new((300.0 * tau).max(200.0));
    let env = settle(params, kernel, tau, &config, 3).unwrap();
    (env.n_max - env.n_min) / params.equilibrium()
}

#[test]
fn amplitude_changes_across_first_hopf_point() {
    let cases = [
        (ModelParams::new(2.0, 5.0, 3.0).unwrap(), Kernel::Dirac),
        (ModelParams::new(2.0, 5.0, 3.0).unwrap(), Kernel::uniform(1.0).unwrap()),
        (ModelParams::new(2.0, 5.0, 0.0).unwrap(), Kernel::uniform(1.9).unwrap()),
        (ModelParams::new(5.0, 5.0, 3.0).unwrap(), Kernel::gamma(2).unwrap()),
        (ModelParams::new(1.8, 5.0, 3.0).unwrap(), Kernel::gamma(3).unwrap()),
        (ModelParams::new(4.0, 5.0, 3.0).unwrap(), Kernel::gamma(3).unwrap()),
    ];
    for (params, kernel) in cases {
        let tau = first_hopf(&params, kernel);
        let below = amplitude(&params, kernel, 0.9 * tau);
        let above = amplitude(&params, kernel, 1.1 * tau);
        assert!(below < TOL, "{kernel} r={}: amplitude {below:e} at 0.9 tau*", params.r());
        assert!(above > 10.0 * TOL, "{kernel} r={}: amplitude {above:e} at 1.1 tau*", params.r());
    }
}

#[test]
fn stable_runs_average_to_equilibrium() {
    let cases = [
        (ModelParams::new(2.0, 5.0, 3.0).unwrap(), Kernel::uniform(1.0).unwrap(), 0.5),
        (ModelParams::new(1.0, 5.0, 0.0).unwrap(), Kernel::Dirac, 1.0),
        (ModelParams::new(5.0, 5.0, 3.0).unwrap(), Kernel::gamma(1).unwrap(), 4.0),
        (ModelParams::new(5.0, 5.0, 3.0).unwrap(), Kernel::gamma(2).unwrap(), 11.0),
    ];
    for (params, kernel, tau) in cases {
        let traj = simulate(&params, kernel, tau, &SimConfig::new(400.0)).unwrap();
        let tail = &traj.values[traj.len() * 9 / 10..];
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let n_star = params.equilibrium();
        assert!(
            ((mean - n_star) / n_star).abs() < 1e-3,
            "{kernel} tau={tau}: mean {mean} vs n* {n_star}"
        );
    }
}

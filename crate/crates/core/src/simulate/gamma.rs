use super::Stepper;
use crate::error::{Error, Result};
use crate::model::{gamma_density, gamma_tail, ModelParams};

/// Kernel mass ignored beyond the truncated history.
const TAIL_MASS: f64 = 1e-10;

/// Linear chain: `n' = r n (1 - x_p/K) + D`, `x_i' = gamma (x_{i-1} - x_i)`
/// with `x_0 = n`. State layout `[n, x_1, .., x_p]`.
pub(crate) struct GammaChain {
    params: ModelParams,
    rate: f64,
    step: f64,
    index: usize,
    state: Vec<f64>,
    scratch: [Vec<f64>; 5],
}

impl GammaChain {
    pub(crate) fn new(params: ModelParams, p: u32, tau_m: f64, step: f64, initial: f64) -> Self {
        let dim = p as usize + 1;
        Self {
            params,
            rate: p as f64 / tau_m,
            step,
            index: 0,
            state: vec![initial; dim],
            scratch: std::array::from_fn(|_| vec![0.0; dim]),
        }
    }

    fn rhs(params: &ModelParams, rate: f64, y: &[f64], out: &mut [f64]) {
        let last = y[y.len() - 1];
        out[0] = params.r() * y[0] * (1.0 - last / params.k()) + params.d();
        for i in 1..y.len() {
            out[i] = rate * (y[i - 1] - y[i]);
        }
    }
}

impl Stepper for GammaChain {
    fn time(&self) -> f64 {
        self.index as f64 * self.step
    }

    fn population(&self) -> f64 {
        self.state[0]
    }

    fn feedback(&self) -> f64 {
        self.state[self.state.len() - 1]
    }

    fn advance(&mut self) -> Result<()> {
        let h = self.step;
        let [k1, k2, k3, k4, tmp] = &mut self.scratch;
        let y = &self.state;
        Self::rhs(&self.params, self.rate, y, k1);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        Self::rhs(&self.params, self.rate, tmp, k2);
        for i in 0..y.len() {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        Self::rhs(&self.params, self.rate, tmp, k3);
        for i in 0..y.len() {
            tmp[i] = y[i] + h * k3[i];
        }
        Self::rhs(&self.params, self.rate, tmp, k4);
        for i in 0..self.state.len() {
            self.state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.index += 1;
        if !self.state.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { t: self.time() });
        }
        Ok(())
    }
}

/// RK4 with the distributed feedback integrated directly: trapezoid rule on
/// the stored grid, exact constant-history remainder, truncation where the
/// kernel tail drops below `TAIL_MASS`.
///
/// For a stage at `t + c h` the nodes are the stage value at lag 0 and the
/// grid values `n(t - j h)` at lags `c h + j h`. The feedback is therefore
/// `(c h / 2) g(0) x + R_c` with `R_c` independent of the stage value `x`,
/// and the feedback at the new grid point equals the `c = 1` formula with
/// `x` the accepted value.
pub(crate) struct GammaDirect {
    params: ModelParams,
    p: u32,
    rate: f64,
    step: f64,
    index: usize,
    n: f64,
    initial: f64,
    current_feedback: f64,
    /// `g(c h + j h)` for `c = 1/2` and `c = 1`.
    weights_half: Vec<f64>,
    weights_one: Vec<f64>,
    g0: f64,
    /// Grid values, newest last in ring order.
    ring: Vec<f64>,
}

impl GammaDirect {
    pub(crate) fn new(params: ModelParams, p: u32, tau_m: f64, step: f64, initial: f64) -> Self {
        let rate = p as f64 / tau_m;
        let mut x = p as f64;
        while gamma_tail(p, x) > TAIL_MASS {
            x *= 1.1;
        }
        let nodes = (x / rate / step).ceil() as usize + 1;
        let weights = |c: f64| -> Vec<f64> {
            (0..=nodes).map(|j| gamma_density(p, rate, (c + j as f64) * step)).collect()
        };
        let mut s = Self {
            params,
            p,
            rate,
            step,
            index: 0,
            n: initial,
            initial,
            current_feedback: 0.0,
            weights_half: weights(0.5),
            weights_one: weights(1.0),
            g0: gamma_density(p, rate, 0.0),
            ring: vec![initial; nodes + 1],
        };
        // at t = 0 the whole window is constant history
        s.current_feedback = initial;
        s
    }

    fn grid(&self, lag_steps: usize) -> f64 {
        if lag_steps > self.index {
            return self.initial;
        }
        self.ring[(self.index - lag_steps) % self.ring.len()]
    }

    /// `R_c` for the stage at `t + c h` (`t` the current grid time).
    fn remainder(&self, c: f64, weights: &[f64]) -> f64 {
        let h = self.step;
        let m = self.index.min(weights.len() - 1);
        let mut sum = 0.0;
        for (j, &w) in weights.iter().enumerate().take(m + 1) {
            sum += w * self.grid(j);
        }
        let interior = h * sum - 0.5 * h * (weights[0] * self.grid(0) + weights[m] * self.grid(m));
        let first = 0.5 * c * h * weights[0] * self.grid(0);
        let tail = if m == self.index {
            self.initial * gamma_tail(self.p, self.rate * (c + m as f64) * h)
        } else {
            0.0
        };
        first + interior + tail
    }

    fn rhs(&self, n: f64, feedback: f64) -> f64 {
        self.params.r() * n * (1.0 - feedback / self.params.k()) + self.params.d()
    }
}

impl Stepper for GammaDirect {
    fn time(&self) -> f64 {
        self.index as f64 * self.step
    }

    fn population(&self) -> f64 {
        self.n
    }

    fn feedback(&self) -> f64 {
        self.current_feedback
    }

    fn advance(&mut self) -> Result<()> {
        let h = self.step;
        let r_half = self.remainder(0.5, &self.weights_half);
        let r_one = self.remainder(1.0, &self.weights_one);
        let g0 = self.g0;
        let stage_half = |x: f64| 0.25 * h * g0 * x + r_half;
        let stage_one = |x: f64| 0.5 * h * g0 * x + r_one;

        let n1 = self.n;
        let k1 = self.rhs(n1, self.current_feedback);
        let n2 = n1 + 0.5 * h * k1;
        let k2 = self.rhs(n2, stage_half(n2));
        let n3 = n1 + 0.5 * h * k2;
        let k3 = self.rhs(n3, stage_half(n3));
        let n4 = n1 + h * k3;
        let k4 = self.rhs(n4, stage_one(n4));
        let n_new = n1 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        self.index += 1;
        if !n_new.is_finite() {
            return Err(Error::NonFinite { t: self.time() });
        }
        let len = self.ring.len();
        self.ring[self.index % len] = n_new;
        self.n = n_new;
        self.current_feedback = stage_one(n_new);
        Ok(())
    }
}

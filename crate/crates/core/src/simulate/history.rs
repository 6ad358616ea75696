/// Ring buffer of past grid values with cubic Hermite interpolation.
///
/// Grid point `i` sits at `t = i * step`. For each point we keep the
/// population, its derivative and the running integral of the population
/// (whose derivative is the population itself), so both `n(t)` and
/// `∫_0^t n` interpolate to fourth order. Before `t = 0` the history is the
/// constant `initial`.
#[derive(Debug, Clone)]
pub(crate) struct History {
    step: f64,
    initial: f64,
    cap: usize,
    newest: usize,
    value: Vec<f64>,
    slope: Vec<f64>,
    integral: Vec<f64>,
}

impl History {
    /// `reach` is the longest lag that will be queried.
    pub(crate) fn new(step: f64, reach: f64, initial: f64) -> Self {
        let cap = (reach / step).ceil() as usize + 4;
        Self {
            step,
            initial,
            cap,
            newest: 0,
            value: vec![initial; cap],
            slope: vec![0.0; cap],
            integral: vec![0.0; cap],
        }
    }

    /// Store grid point `index`; points must arrive in order starting at 0.
    pub(crate) fn push(&mut self, index: usize, value: f64, slope: f64, integral: f64) {
        debug_assert!(index == 0 || index == self.newest + 1);
        let slot = index % self.cap;
        self.value[slot] = value;
        self.slope[slot] = slope;
        self.integral[slot] = integral;
        self.newest = index;
    }

    fn segment(&self, t: f64) -> (usize, f64) {
        let x = t / self.step;
        let mut i = x.floor() as usize;
        if i >= self.newest {
            // query at (or rounding past) the newest point
            i = self.newest.saturating_sub(1);
        }
        debug_assert!(
            i + self.cap > self.newest + 1,
            "history query at t = {t} outside the buffer"
        );
        (i, x - i as f64)
    }

    fn hermite(&self, i: usize, theta: f64, y: &[f64], dy: &[f64]) -> f64 {
        let (a, b) = (i % self.cap, (i + 1) % self.cap);
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + theta;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * y[a] + h10 * self.step * dy[a] + h01 * y[b] + h11 * self.step * dy[b]
    }

    pub(crate) fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.initial;
        }
        let (i, theta) = self.segment(t);
        self.hermite(i, theta, &self.value, &self.slope)
    }

    /// `∫_0^t n(s) ds`, negative for `t < 0`.
    pub(crate) fn integral_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.initial * t;
        }
        let (i, theta) = self.segment(t);
        self.hermite(i, theta, &self.integral, &self.value)
    }
}

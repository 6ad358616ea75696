use super::history::History;
use super::Stepper;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// How the feedback term is read from the past.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Feedback {
    /// No delay: the logistic ODE.
    Instant,
    /// `n(t - lag)`.
    Point { lag: f64 },
    /// Mean of `n` over `[t - far, t - near]`, taken as a difference of the
    /// running integral.
    Window { near: f64, far: f64 },
}

impl Feedback {
    fn reach(self) -> f64 {
        match self {
            Feedback::Instant => 0.0,
            Feedback::Point { lag } => lag,
            Feedback::Window { far, .. } => far,
        }
    }
}

/// RK4 for a scalar equation whose feedback is looked up in an
/// interpolated history. The running integral `I' = n` is carried along so
/// window means stay fourth order.
pub(crate) struct ScalarDelay {
    params: ModelParams,
    feedback: Feedback,
    step: f64,
    index: usize,
    n: f64,
    integral: f64,
    current_feedback: f64,
    slope: f64,
    history: History,
}

impl ScalarDelay {
    pub(crate) fn new(params: ModelParams, feedback: Feedback, step: f64, initial: f64) -> Result<Self> {
        let shortest = match feedback {
            Feedback::Instant => f64::INFINITY,
            Feedback::Point { lag } => lag,
            Feedback::Window { near, .. } => near,
        };
        if step > shortest {
            return Err(Error::StepTooLarge {
                step,
                reason: format!("exceeds the shortest lag {shortest}"),
            });
        }
        let mut s = Self {
            params,
            feedback,
            step,
            index: 0,
            n: initial,
            integral: 0.0,
            current_feedback: 0.0,
            slope: 0.0,
            history: History::new(step, feedback.reach(), initial),
        };
        s.current_feedback = s.feedback_at(0.0, initial);
        s.slope = s.rhs(initial, s.current_feedback);
        s.history.push(0, initial, s.slope, 0.0);
        Ok(s)
    }

    fn rhs(&self, n: f64, feedback: f64) -> f64 {
        self.params.r() * n * (1.0 - feedback / self.params.k()) + self.params.d()
    }

    fn feedback_at(&self, t: f64, n_stage: f64) -> f64 {
        match self.feedback {
            Feedback::Instant => n_stage,
            Feedback::Point { lag } => self.history.value_at(t - lag),
            Feedback::Window { near, far } => {
                (self.history.integral_at(t - near) - self.history.integral_at(t - far)) / (far - near)
            }
        }
    }
}

impl Stepper for ScalarDelay {
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
        let t = self.time();
        let n1 = self.n;
        let k1 = self.slope;
        let n2 = n1 + 0.5 * h * k1;
        let k2 = self.rhs(n2, self.feedback_at(t + 0.5 * h, n2));
        let n3 = n1 + 0.5 * h * k2;
        let k3 = self.rhs(n3, self.feedback_at(t + 0.5 * h, n3));
        let n4 = n1 + h * k3;
        let k4 = self.rhs(n4, self.feedback_at(t + h, n4));

        let n_new = n1 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t_new = (self.index + 1) as f64 * h;
        if !n_new.is_finite() {
            return Err(Error::NonFinite { t: t_new });
        }
        self.integral += h / 6.0 * (n1 + 2.0 * n2 + 2.0 * n3 + n4);
        self.n = n_new;
        self.index += 1;
        // every lag is at least one step, so the lookup only reads stored points
        self.current_feedback = self.feedback_at(t_new, n_new);
        self.slope = self.rhs(n_new, self.current_feedback);
        self.history.push(self.index, n_new, self.slope, self.integral);
        Ok(())
    }
}

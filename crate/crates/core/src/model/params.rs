use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Growth rate `r`, carrying capacity `K` and constant inflow `D` of the
/// logistic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    r: f64,
    k: f64,
    d: f64,
}

impl ModelParams {
    pub fn new(r: f64, k: f64, d: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::invalid("r", format!("must be finite and > 0, got {r}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid("K", format!("must be finite and > 0, got {k}")));
        }
        if !(d.is_finite() && d >= 0.0) {
            return Err(Error::invalid("D", format!("must be finite and >= 0, got {d}")));
        }
        Ok(Self { r, k, d })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Same `K` and `D`, different growth rate.
    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(r, self.k, self.d)
    }

    /// The unique positive equilibrium `n*`, the larger root of
    /// `r n (1 - n/K) + D = 0`. Always `n* >= K`.
    pub fn equilibrium(&self) -> f64 {
        let disc = (1.0 + 4.0 * self.d / (self.r * self.k)).sqrt();
        0.5 * (1.0 + disc) * self.k
    }

    /// `r n (1 - n/K) + D`, the right-hand side at a constant state.
    pub fn growth(&self, n: f64) -> f64 {
        self.r * n * (1.0 - n / self.k) + self.d
    }
}

/// Growth rate that places the equilibrium at `n_star` for fixed `K`, `D`.
/// Inverts `r n*(n* - K)/K = D`; only meaningful for `n_star > K`.
pub fn rate_for_equilibrium(k: f64, d: f64, n_star: f64) -> f64 {
    d * k / (n_star * (n_star - k))
}

//! Pure-imaginary crossings of the characteristic function, Hopf curves in
//! the `(r, tau_m)` plane, transversality and stability classification.
//!
//! On the imaginary axis `Delta(iw) = 0` splits into
//!
//! ```text
//! C(w) = K/n* - 1,        S(w) = w K / (tau_m r n*)
//! ```
//!
//! For fixed `(r, K, D)` the first equation fixes the candidate
//! frequencies, the second gives the delay at which each one is reached.
//! For fixed `(K, D)` and `w` as a free parameter the same equations trace
//! the Hopf curve.

mod classify;
mod hopf;
mod oracle;
mod roots;

use serde::{Deserialize, Serialize};

pub use classify::{classify, StabilityState, StabilityVerdict};
pub use hopf::{
    crossing_frequencies_d0, crossing_frequencies_d0_with, gamma2_omega_pm, hopf_curve_dpos,
    hopf_curve_dpos_with, hopf_delay_d0, hopf_points, tau_slope, transversality_dpos,
    transversality_value, Asymptote, CurveOptions, D0Crossings, HopfCurve, RootFrequency,
};
pub use oracle::{gamma_characteristic_polynomial, gamma_eigen_oracle, gamma_eigenvalues};
pub use roots::{bisect, scan_roots, ScanOptions};

/// Direction in which a pair of roots crosses the imaginary axis as the
/// mean delay increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    /// Into the right half plane: stability is lost.
    LeftToRight,
    /// Back into the left half plane: stability is regained.
    RightToLeft,
}

impl Crossing {
    pub fn signum(self) -> i64 {
        match self {
            Crossing::LeftToRight => 1,
            Crossing::RightToLeft => -1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Crossing::LeftToRight => "left_to_right",
            Crossing::RightToLeft => "right_to_left",
        }
    }
}

/// A pure-imaginary root `i omega` of the characteristic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfPoint {
    /// Crossing frequency in mean-delay units.
    pub omega: f64,
    pub r: f64,
    pub tau_m: f64,
    pub crossing: Crossing,
}

/// Existence thresholds on `r` for the gamma kernels of order 2 and 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaThresholds {
    /// Order 2: Hopf points exist only for `r > r_star`.
    pub r_star: f64,
    /// Order 3: Hopf points exist only for `r > r_lower`.
    pub r_lower: f64,
    /// Order 3: vertical asymptote of the Hopf curve.
    pub r_upper: f64,
}

impl GammaThresholds {
    pub fn new(k: f64, d: f64) -> Self {
        Self {
            r_star: 49.0 * d / (8.0 * k),
            r_lower: 9.0 * d / (4.0 * k),
            r_upper: 49.0 * d / (8.0 * k),
        }
    }
}

/// With `D = 0` and a gamma kernel of order `p >= 2`, `n* = K` is stable
/// iff `r < factor * gamma` where `gamma = p / tau_m` is the kernel rate.
pub fn gamma_d0_rate_factor(p: u32) -> f64 {
    let half = std::f64::consts::PI / (2.0 * p as f64);
    half.tan() / half.cos().powi(p as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_rate_factor_reduces_to_known_bounds() {
        assert!((gamma_d0_rate_factor(2) - 2.0).abs() < 1e-14);
        assert!((gamma_d0_rate_factor(3) - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn thresholds_for_reference_parameters() {
        let th = GammaThresholds::new(5.0, 3.0);
        assert!((th.r_star - 3.675).abs() < 1e-12);
        assert!((th.r_lower - 1.35).abs() < 1e-12);
        assert!((th.r_upper - 3.675).abs() < 1e-12);
        assert!(th.r_lower < th.r_upper);
    }
}

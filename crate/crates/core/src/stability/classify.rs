use serde::Serialize;

use super::hopf::hopf_points;
use super::roots::ScanOptions;
use super::HopfPoint;
use crate::error::{Error, Result};
use crate::model::{Kernel, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityState {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub state: StabilityState,
    /// Distance in `tau_m` to the nearest Hopf point, `None` if there is
    /// no crossing at this growth rate.
    pub margin: Option<f64>,
    /// Set when `tau_m` sits on a Hopf point; the verdict is then
    /// `Unstable` with margin 0.
    pub marginal: bool,
    /// Net number of root pairs in the right half plane.
    pub unstable_pairs: usize,
    /// Crossings at this growth rate, ordered by delay.
    pub crossings: Vec<HopfPoint>,
}

/// Relative distance in `tau_m` below which a query counts as sitting on
/// a Hopf point.
const TIE_TOL: f64 = 1e-12;

/// Linear stability of `n*` at mean delay `tau_m`, by counting signed
/// crossings of the imaginary axis between 0 and `tau_m`.
pub fn classify(params: &ModelParams, kernel: Kernel, tau_m: f64) -> Result<StabilityVerdict> {
    if !(tau_m.is_finite() && tau_m >= 0.0) {
        return Err(Error::invalid("tau_m", format!("must be finite and >= 0, got {tau_m}")));
    }
    kernel.validate()?;

    // |S| <= 1, so a crossing at frequency w needs tau >= w K / (r n*):
    // scanning up to this bound sees every crossing below tau_m.
    let reach = tau_m * params.r() * params.equilibrium() / params.k();
    let defaults = ScanOptions::default();
    let scan = defaults.with_max(defaults.omega_max.max(1.05 * reach + 1.0));
    let crossings = hopf_points(params, kernel, &scan)?;

    let tie = TIE_TOL * tau_m.max(1.0);
    let margin = crossings
        .iter()
        .map(|p| (p.tau_m - tau_m).abs())
        .min_by(f64::total_cmp);
    let marginal = margin.is_some_and(|m| m <= tie);

    let net: i64 = crossings
        .iter()
        .filter(|p| p.tau_m < tau_m - tie)
        .map(|p| p.crossing.signum())
        .sum();
    debug_assert!(net >= 0, "more roots left the right half plane than entered");
    let unstable_pairs = net.max(0) as usize;

    let state = if marginal || unstable_pairs > 0 {
        StabilityState::Unstable
    } else {
        StabilityState::Stable
    };
    Ok(StabilityVerdict {
        state,
        margin: if marginal { Some(0.0) } else { margin },
        marginal,
        unstable_pairs,
        crossings,
    })
}

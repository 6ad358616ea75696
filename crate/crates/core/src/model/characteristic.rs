use num_complex::Complex64;
use serde::Serialize;

use super::kernel::Kernel;
use super::params::ModelParams;
use crate::error::{Error, Result};

/// A complex frequency (in mean-delay units) and the characteristic
/// function evaluated there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicPoint {
    pub lambda: Complex64,
    pub delta: Complex64,
}

/// Linearization coefficients at the equilibrium in mean-delay time:
/// `Delta(l) = l + a + b G(l)` with `a = tau r (n* - K)/K`, `b = tau r n*/K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub a: f64,
    pub b: f64,
}

impl Linearization {
    pub fn new(params: &ModelParams, tau_m: f64) -> Self {
        let n = params.equilibrium();
        let k = params.k();
        Self {
            a: tau_m * params.r() * (n - k) / k,
            b: tau_m * params.r() * n / k,
        }
    }
}

pub(crate) fn check_delay(tau_m: f64) -> Result<()> {
    if !(tau_m.is_finite() && tau_m > 0.0) {
        return Err(Error::invalid("tau_m", format!("mean delay must be finite and > 0, got {tau_m}")));
    }
    Ok(())
}

/// `Delta(lambda) = lambda + tau r (n* - K)/K + tau (r n*/K) G(lambda)`.
pub fn characteristic(
    params: &ModelParams,
    kernel: Kernel,
    tau_m: f64,
    lambda: Complex64,
) -> Result<CharacteristicPoint> {
    kernel.validate()?;
    check_delay(tau_m)?;
    let lin = Linearization::new(params, tau_m);
    let g = kernel.laplace(lambda)?;
    Ok(CharacteristicPoint {
        lambda,
        delta: lambda + lin.a + lin.b * g,
    })
}

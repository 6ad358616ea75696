//! Cosine and sine transforms of the normalized delay kernel,
//!
//! ```text
//! C(w) = ∫ cos(w s) g(s) ds,    S(w) = ∫ sin(w s) g(s) ds,
//! ```
//!
//! together with their first derivatives. On the imaginary axis the
//! Laplace transform of the kernel is `G(iw) = C(w) - i S(w)`.

use serde::Serialize;

use super::kernel::Kernel;
use crate::error::{Error, Result};

/// Below this value of `sigma * w` the uniform transforms switch to
/// their Maclaurin series.
const UNIFORM_SERIES_CUTOFF: f64 = 1e-4;

/// `C`, `S` and their derivatives at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransformPoint {
    pub omega: f64,
    pub c: f64,
    pub s: f64,
    pub dc: f64,
    pub ds: f64,
}

/// Evaluator bundle for the transforms of one kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTransforms {
    kernel: Kernel,
}

/// Build the transform evaluators for a validated kernel.
pub fn transforms(kernel: Kernel) -> Result<KernelTransforms> {
    kernel.validate()?;
    Ok(KernelTransforms { kernel })
}

impl KernelTransforms {
    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// All four values at `omega`; rejects negative frequencies.
    pub fn at(&self, omega: f64) -> Result<TransformPoint> {
        if omega < 0.0 || omega.is_nan() {
            return Err(Error::NegativeFrequency(omega));
        }
        Ok(TransformPoint {
            omega,
            c: self.c(omega),
            s: self.s(omega),
            dc: self.dc(omega),
            ds: self.ds(omega),
        })
    }

    pub fn c(&self, omega: f64) -> f64 {
        match self.kernel {
            Kernel::Uniform { sigma } => omega.cos() * sinc(0.5 * sigma * omega, sigma * omega),
            Kernel::Dirac => omega.cos(),
            Kernel::Gamma { p } => match p {
                1 => 1.0 / (1.0 + omega * omega),
                2 => {
                    let u = omega * omega / 4.0;
                    (1.0 - u) / ((1.0 + u) * (1.0 + u))
                }
                3 => (1.0 - omega * omega / 3.0) / (1.0 + omega * omega / 9.0).powi(3),
                _ => {
                    let x = omega / p as f64;
                    even_part(p, x) / (1.0 + x * x).powi(p as i32)
                }
            },
        }
    }

    pub fn s(&self, omega: f64) -> f64 {
        match self.kernel {
            Kernel::Uniform { sigma } => omega.sin() * sinc(0.5 * sigma * omega, sigma * omega),
            Kernel::Dirac => omega.sin(),
            Kernel::Gamma { p } => match p {
                1 => omega / (1.0 + omega * omega),
                2 => {
                    let u = 1.0 + omega * omega / 4.0;
                    omega / (u * u)
                }
                3 => {
                    omega * (1.0 - omega * omega / 27.0) / (1.0 + omega * omega / 9.0).powi(3)
                }
                _ => {
                    let x = omega / p as f64;
                    odd_part(p, x) / (1.0 + x * x).powi(p as i32)
                }
            },
        }
    }

    pub fn dc(&self, omega: f64) -> f64 {
        match self.kernel {
            Kernel::Uniform { sigma } => {
                let half = 0.5 * sigma;
                let j = sinc(half * omega, sigma * omega);
                let dj = half * sinc_derivative(half * omega, sigma * omega);
                -omega.sin() * j + omega.cos() * dj
            }
            Kernel::Dirac => -omega.sin(),
            Kernel::Gamma { p } => match p {
                1 => {
                    let u = 1.0 + omega * omega;
                    -2.0 * omega / (u * u)
                }
                2 => {
                    let u = 1.0 + omega * omega / 4.0;
                    (omega.powi(3) / 8.0 - 1.5 * omega) / u.powi(3)
                }
                3 => {
                    let u = 1.0 + omega * omega / 9.0;
                    (4.0 * omega.powi(3) / 27.0 - 4.0 * omega / 3.0) / u.powi(4)
                }
                _ => {
                    // d/dw Re G(iw) = Im (1 + i w/p)^{-(p+1)}
                    let x = omega / p as f64;
                    -odd_part(p + 1, x) / (1.0 + x * x).powi(p as i32 + 1)
                }
            },
        }
    }

    pub fn ds(&self, omega: f64) -> f64 {
        match self.kernel {
            Kernel::Uniform { sigma } => {
                let half = 0.5 * sigma;
                let j = sinc(half * omega, sigma * omega);
                let dj = half * sinc_derivative(half * omega, sigma * omega);
                omega.cos() * j + omega.sin() * dj
            }
            Kernel::Dirac => omega.cos(),
            Kernel::Gamma { p } => match p {
                1 => {
                    let w2 = omega * omega;
                    (1.0 - w2) / ((1.0 + w2) * (1.0 + w2))
                }
                2 => {
                    let w2 = omega * omega;
                    16.0 * (4.0 - 3.0 * w2) / (w2 + 4.0).powi(3)
                }
                3 => {
                    let w2 = omega * omega;
                    81.0 * (w2 * w2 - 54.0 * w2 + 81.0) / (w2 + 9.0).powi(4)
                }
                _ => {
                    let x = omega / p as f64;
                    even_part(p + 1, x) / (1.0 + x * x).powi(p as i32 + 1)
                }
            },
        }
    }
}

/// `Re (1 - i x)^m = sum_j binom(m, 2j) (-1)^j x^{2j}`.
pub fn even_part(m: u32, x: f64) -> f64 {
    let x2 = x * x;
    let mut sum = 0.0;
    let mut pow = 1.0;
    let mut sign = 1.0;
    for j in 0..=m / 2 {
        sum += sign * binomial(m, 2 * j) * pow;
        pow *= x2;
        sign = -sign;
    }
    sum
}

/// `-Im (1 - i x)^m = sum_j binom(m, 2j+1) (-1)^j x^{2j+1}`.
pub fn odd_part(m: u32, x: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut sum = 0.0;
    let mut pow = x;
    let mut sign = 1.0;
    for j in 0..=(m - 1) / 2 {
        sum += sign * binomial(m, 2 * j + 1) * pow;
        pow *= x2;
        sign = -sign;
    }
    sum
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// sin(x)/x; `scale` decides when to use the series.
fn sinc(x: f64, scale: f64) -> f64 {
    if scale.abs() < UNIFORM_SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0 - x2 * x2 * x2 / 5040.0
    } else {
        x.sin() / x
    }
}

fn sinc_derivative(x: f64, scale: f64) -> f64 {
    if scale.abs() < UNIFORM_SERIES_CUTOFF {
        let x2 = x * x;
        x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0 + x2 * x2 * x2 / 45360.0)
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

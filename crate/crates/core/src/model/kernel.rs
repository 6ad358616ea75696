use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Delay distribution family. All analysis works with the kernel
/// normalized to unit mean delay; the mean delay `tau_m` is supplied
/// separately wherever it matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Kernel {
    /// Uniform on `[1 - sigma/2, 1 + sigma/2]` (normalized), `0 < sigma < 2`.
    Uniform { sigma: f64 },
    /// Point mass at the mean delay.
    Dirac,
    /// Gamma density of integer order `p`, rate `p` (normalized).
    Gamma { p: u32 },
}

impl Kernel {
    pub fn uniform(sigma: f64) -> Result<Self> {
        let k = Kernel::Uniform { sigma };
        k.validate()?;
        Ok(k)
    }

    pub fn gamma(p: u32) -> Result<Self> {
        let k = Kernel::Gamma { p };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Uniform { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0 && sigma < 2.0) {
                    return Err(Error::invalid(
                        "sigma",
                        format!("uniform width must lie in (0, 2), got {sigma}"),
                    ));
                }
            }
            Kernel::Dirac => {}
            Kernel::Gamma { p } => {
                if p == 0 {
                    return Err(Error::invalid("p", "gamma order must be >= 1"));
                }
            }
        }
        Ok(())
    }

    /// Density of the normalized kernel at `s >= 0`. The Dirac kernel has
    /// no density and returns `None`.
    pub fn density(&self, s: f64) -> Option<f64> {
        match *self {
            Kernel::Uniform { sigma } => {
                let inside = (1.0 - 0.5 * sigma..=1.0 + 0.5 * sigma).contains(&s);
                Some(if inside { 1.0 / sigma } else { 0.0 })
            }
            Kernel::Dirac => None,
            Kernel::Gamma { p } => Some(gamma_density(p, p as f64, s)),
        }
    }

    /// Laplace transform of the normalized kernel.
    pub fn laplace(&self, lambda: Complex64) -> Result<Complex64> {
        match *self {
            Kernel::Dirac => Ok((-lambda).exp()),
            Kernel::Uniform { sigma } => {
                // 2 sinh(sigma lambda / 2) e^{-lambda} / (sigma lambda)
                let z = 0.5 * sigma * lambda;
                Ok(sinhc(z) * (-lambda).exp())
            }
            Kernel::Gamma { p } => {
                let base = lambda + p as f64;
                check_pole(p, base)?;
                Ok((p as f64 / base).powu(p))
            }
        }
    }

    /// Derivative of [`Kernel::laplace`] with respect to `lambda`.
    pub fn laplace_derivative(&self, lambda: Complex64) -> Result<Complex64> {
        match *self {
            Kernel::Dirac => Ok(-(-lambda).exp()),
            Kernel::Uniform { sigma } => {
                let z = 0.5 * sigma * lambda;
                let e = (-lambda).exp();
                Ok(e * (0.5 * sigma * sinhc_derivative(z) - sinhc(z)))
            }
            Kernel::Gamma { p } => {
                let base = lambda + p as f64;
                check_pole(p, base)?;
                Ok(-(p as f64 / base).powu(p + 1))
            }
        }
    }

    /// Lags (in units of the mean delay) outside which the normalized
    /// kernel carries less than `tail` mass.
    pub fn support(&self, tail: f64) -> (f64, f64) {
        match *self {
            Kernel::Uniform { sigma } => (1.0 - 0.5 * sigma, 1.0 + 0.5 * sigma),
            Kernel::Dirac => (1.0, 1.0),
            Kernel::Gamma { p } => {
                // grow until the Poisson tail drops below `tail`
                let pf = p as f64;
                let mut s = 1.0;
                while gamma_tail(p, pf * s) > tail {
                    s *= 1.25;
                }
                (0.0, s)
            }
        }
    }
}

fn check_pole(p: u32, base: Complex64) -> Result<()> {
    let distance = base.norm();
    if distance < 1e-12 {
        return Err(Error::Pole { order: p, distance });
    }
    Ok(())
}

/// sinh(z)/z with its removable singularity filled in.
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0
    } else {
        z.sinh() / z
    }
}

/// Derivative of sinh(z)/z.
fn sinhc_derivative(z: Complex64) -> Complex64 {
    if z.norm() < 1e-2 {
        let z2 = z * z;
        z * (1.0 / 3.0 + z2 / 30.0 + z2 * z2 / 840.0 + z2 * z2 * z2 / 45360.0)
    } else {
        (z * z.cosh() - z.sinh()) / (z * z)
    }
}

/// Gamma density of integer order `p` and rate `rate`.
pub fn gamma_density(p: u32, rate: f64, s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    if s == 0.0 {
        return if p == 1 { rate } else { 0.0 };
    }
    // rate^p s^{p-1} e^{-rate s} / (p-1)!, assembled in log space
    let pf = p as f64;
    let log_fact: f64 = (1..p).map(|i| (i as f64).ln()).sum();
    (pf * rate.ln() + (pf - 1.0) * s.ln() - rate * s - log_fact).exp()
}

/// Mass of the integer-order gamma distribution beyond `x` in rate units:
/// `e^{-x} sum_{k<p} x^k / k!`.
pub fn gamma_tail(p: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..p {
        term *= x / k as f64;
        sum += term;
    }
    (-x).exp() * sum
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Uniform { sigma } => write!(f, "uniform:sigma={sigma}"),
            Kernel::Dirac => write!(f, "dirac"),
            Kernel::Gamma { p } => write!(f, "gamma:p={p}"),
        }
    }
}

/// Accepts `dirac`, `uniform:sigma=<x>` and `gamma:p=<n>`.
impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, args) = match s.split_once(':') {
            Some((f, a)) => (f.trim(), Some(a.trim())),
            None => (s, None),
        };
        let arg = |key: &str| -> Result<&str> {
            let args = args.ok_or_else(|| {
                Error::invalid("kernel", format!("`{family}` requires `{key}=<value>`"))
            })?;
            let (k, v) = args
                .split_once('=')
                .ok_or_else(|| Error::invalid("kernel", format!("expected `{key}=<value>`, got `{args}`")))?;
            if k.trim() != key {
                return Err(Error::invalid("kernel", format!("unknown kernel argument `{}`", k.trim())));
            }
            Ok(v.trim())
        };
        match family.to_ascii_lowercase().as_str() {
            "dirac" | "delta" => {
                if let Some(a) = args {
                    if !a.is_empty() {
                        return Err(Error::invalid("kernel", "dirac takes no arguments"));
                    }
                }
                Ok(Kernel::Dirac)
            }
            "uniform" => {
                let v = arg("sigma")?;
                let sigma: f64 = v
                    .parse()
                    .map_err(|_| Error::invalid("sigma", format!("not a number: `{v}`")))?;
                Kernel::uniform(sigma)
            }
            "gamma" => {
                let v = arg("p")?;
                let p: u32 = v
                    .parse()
                    .map_err(|_| Error::invalid("p", format!("not a positive integer: `{v}`")))?;
                Kernel::gamma(p)
            }
            other => Err(Error::invalid("kernel", format!("unknown kernel family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_kernel_specs() {
        assert_eq!("dirac".parse::<Kernel>().unwrap(), Kernel::Dirac);
        assert_eq!("gamma:p=2".parse::<Kernel>().unwrap(), Kernel::Gamma { p: 2 });
        assert_eq!(
            "uniform:sigma=1".parse::<Kernel>().unwrap(),
            Kernel::Uniform { sigma: 1.0 }
        );
        assert!("uniform:sigma=2.5".parse::<Kernel>().is_err());
        assert!("uniform:sigma=0".parse::<Kernel>().is_err());
        assert!("gamma:p=0".parse::<Kernel>().is_err());
        assert!("gamma:q=2".parse::<Kernel>().is_err());
        assert!("gamma".parse::<Kernel>().is_err());
        assert!("weibull:k=2".parse::<Kernel>().is_err());
        let err = "uniform:sigma=2.5".parse::<Kernel>().unwrap_err();
        assert!(err.to_string().contains("sigma"));
    }

    #[test]
    fn display_round_trips() {
        for k in [Kernel::Dirac, Kernel::Gamma { p: 3 }, Kernel::Uniform { sigma: 0.25 }] {
            assert_eq!(k.to_string().parse::<Kernel>().unwrap(), k);
        }
    }

    #[test]
    fn gamma_tail_matches_complement() {
        // p = 1 is the exponential tail
        assert!((gamma_tail(1, 2.0) - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(gamma_tail(3, 0.0), 1.0);
        assert!(gamma_tail(2, 40.0) < 1e-15);
    }

    #[test]
    fn gamma_pole_is_reported() {
        let k = Kernel::Gamma { p: 2 };
        let err = k.laplace(Complex64::new(-2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::Pole { order: 2, .. }));
    }

    #[test]
    fn laplace_derivative_matches_difference_quotient() {
        let h = 1e-6;
        for k in [Kernel::Dirac, Kernel::Uniform { sigma: 0.7 }, Kernel::Gamma { p: 3 }] {
            for lam in [Complex64::new(0.3, 1.1), Complex64::new(-0.2, 4.0), Complex64::new(1e-6, 0.0)] {
                let fd = (k.laplace(lam + h).unwrap() - k.laplace(lam - h).unwrap()) / (2.0 * h);
                let an = k.laplace_derivative(lam).unwrap();
                assert!((fd - an).norm() < 1e-7, "{k} at {lam}: {fd} vs {an}");
            }
        }
    }
}

//! Finite-dimensional check for gamma kernels: multiplying the
//! characteristic function by `(lambda + p)^p` gives a polynomial of degree
//! `p + 1` whose roots are computed as companion-matrix eigenvalues.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{characteristic, check_delay, Kernel, Linearization, ModelParams};

const MAX_ORDER: u32 = 8;

/// Coefficients (constant term first) of
/// `(lambda + a)(lambda + p)^p + b p^p`.
pub fn gamma_characteristic_polynomial(params: &ModelParams, p: u32, tau_m: f64) -> Vec<f64> {
    let lin = Linearization::new(params, tau_m);
    let pf = p as f64;
    let mut poly = vec![1.0];
    for _ in 0..p {
        poly = multiply_linear(&poly, pf);
    }
    poly = multiply_linear(&poly, lin.a);
    poly[0] += lin.b * pf.powi(p as i32);
    poly
}

/// Multiply by `(lambda + c)`.
fn multiply_linear(poly: &[f64], c: f64) -> Vec<f64> {
    let mut out = vec![0.0; poly.len() + 1];
    for (i, &coef) in poly.iter().enumerate() {
        out[i] += c * coef;
        out[i + 1] += coef;
    }
    out
}

fn horner(poly: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// Characteristic roots (normalized time) for a gamma kernel of order
/// `p <= 8`.
pub fn gamma_eigenvalues(params: &ModelParams, p: u32, tau_m: f64) -> Result<Vec<Complex64>> {
    if p == 0 || p > MAX_ORDER {
        return Err(Error::invalid("p", format!("oracle supports 1 <= p <= {MAX_ORDER}, got {p}")));
    }
    check_delay(tau_m)?;
    let poly = gamma_characteristic_polynomial(params, p, tau_m);
    let degree = poly.len() - 1;

    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -poly[i] / poly[degree];
    }
    let schur = Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::RootFinder(format!("Schur iteration did not converge (p = {p}, tau_m = {tau_m})")))?;
    let raw = schur.complex_eigenvalues();

    let kernel = Kernel::Gamma { p };
    let mut roots = Vec::with_capacity(degree);
    for &z0 in raw.iter() {
        // a few Newton steps on the polynomial to polish
        let mut z = z0;
        for _ in 0..3 {
            let (v, dv) = horner(&poly, z);
            if dv.norm() == 0.0 {
                break;
            }
            let next = z - v / dv;
            if !next.re.is_finite() || !next.im.is_finite() {
                break;
            }
            z = next;
        }
        // the pole at -p is not a root of Delta
        let Ok(pt) = characteristic(params, kernel, tau_m, z) else {
            continue;
        };
        let scale = 1.0 + z.norm() + Linearization::new(params, tau_m).b;
        if pt.delta.norm() <= 1e-6 * scale {
            roots.push(z);
        }
    }
    if roots.is_empty() {
        return Err(Error::RootFinder("no characteristic root survived back-substitution".into()));
    }
    Ok(roots)
}

/// Largest real part among the characteristic roots.
pub fn gamma_eigen_oracle(params: &ModelParams, p: u32, tau_m: f64) -> Result<f64> {
    Ok(gamma_eigenvalues(params, p, tau_m)?
        .into_iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

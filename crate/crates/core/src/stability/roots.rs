//! Sign-scan root bracketing with bisection refinement.

/// Uniform-grid scan settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub omega_min: f64,
    pub omega_max: f64,
    pub step: f64,
    /// Bracket width at which bisection stops.
    pub tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            omega_min: 1e-6,
            omega_max: 8.0 * std::f64::consts::PI,
            step: 1e-3,
            tol: 1e-12,
        }
    }
}

impl ScanOptions {
    pub fn with_max(self, omega_max: f64) -> Self {
        Self { omega_max, ..self }
    }
}

/// Every sign change of `f` on the scan grid, refined to `opts.tol`.
/// Grid points where `f` is exactly zero are reported as roots. Roots
/// of even multiplicity are invisible to the scan.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, opts: &ScanOptions) -> Vec<f64> {
    let mut roots = Vec::new();
    let n = ((opts.omega_max - opts.omega_min) / opts.step).ceil().max(1.0) as usize;
    let grid = |i: usize| (opts.omega_min + i as f64 * opts.step).min(opts.omega_max);

    let mut a = grid(0);
    let mut fa = f(a);
    if fa == 0.0 {
        roots.push(a);
    }
    for i in 1..=n {
        let b = grid(i);
        let fb = f(b);
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && fa.signum() != fb.signum() && fa.is_finite() && fb.is_finite() {
            roots.push(bisect(&f, a, b, fa, opts.tol));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// Bisection on a bracket with `f(a)` of sign opposite to `f(b)`.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn finds_all_cosine_roots() {
        let roots = scan_roots(f64::cos, &ScanOptions::default());
        assert_eq!(roots.len(), 8);
        for (k, r) in roots.iter().enumerate() {
            assert!((r - (PI / 2.0 + k as f64 * PI)).abs() < 1e-11);
        }
    }

    #[test]
    fn no_roots_for_positive_function() {
        assert!(scan_roots(|x| 1.0 / (1.0 + x * x), &ScanOptions::default()).is_empty());
    }

    #[test]
    fn exact_grid_zero_is_reported_once() {
        let opts = ScanOptions { omega_min: 0.0, omega_max: 2.0, step: 0.25, tol: 1e-12 };
        let roots = scan_roots(|x| x - 1.0, &opts);
        assert_eq!(roots, vec![1.0]);
    }
}

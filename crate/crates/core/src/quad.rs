//! Quadrature kernels: adaptive Simpson for profile integrals and cached
//! Gauss-Legendre rules for the smooth curve-family integrands.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance
/// `tol`. Recursion accepts a panel once the two-half refinement changes the
/// estimate by less than `15 * tol`, and applies the Richardson correction
/// `(fine - coarse) / 15`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson_panel(a, b, fa, fm, fb);
    adaptive_step(f, a, b, fa, fm, fb, whole, tol, 52)
}

/// Adaptive Simpson over an interval subdivided at the sorted interior
/// points `splits` (points outside `(a, b)` are ignored). Used when the
/// integrand is smooth between known joints but only continuous across them.
pub fn adaptive_simpson_split<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    splits: &[f64],
    tol: f64,
) -> f64 {
    let mut cuts: Vec<f64> = splits.iter().copied().filter(|s| *s > a && *s < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut lo = a;
    let mut total = 0.0;
    let n = cuts.len() + 1;
    for i in 0..n {
        let hi = if i < cuts.len() { cuts[i] } else { b };
        total += adaptive_simpson(f, lo, hi, tol / n as f64);
        lo = hi;
    }
    total
}

fn simpson_panel(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let refined = left + right;
    if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
        return refined + (refined - whole) / 15.0;
    }
    adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed once per `n` by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss-legendre cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "rule needs at least two nodes");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for k in 0..half {
        // Chebyshev-based initial guess for the k-th positive root.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_value_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        weights[k] = w;
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = w;
    }
    (nodes, weights)
}

fn legendre_value_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre integral of `f` over `[a, b]` with an `n`-point rule.
pub fn integrate_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (nodes, weights) = (&rule.0, &rule.1);
    let mid = 0.5 * (a + b);
    let halfw = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        acc += w * f(mid + halfw * x);
    }
    acc * halfw
}

/// Trapezoid sum of equally spaced samples spanning `[a, b]` inclusive.
pub fn trapezoid_samples(samples: &[f64], a: f64, b: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    let interior: f64 = samples[1..n - 1].iter().sum();
    h * (0.5 * (samples[0] + samples[n - 1]) + interior)
}

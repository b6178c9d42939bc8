//! Bracketed scalar root finding for the transcendental equations behind the
//! optimal constants, with verified sign changes and cached monotonicity
//! scans of the conformal-type maps before inversion.

use crate::error::{Error, Result};
use crate::geometry::inverse_gudermannian;
use crate::io::f64_str;
use serde::{Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::sync::OnceLock;

/// Brackets are clipped this far below `pi/2` to stay clear of the tangent
/// singularity.
const SINGULARITY_GUARD: f64 = 1e-9;

/// Result of a bracketed solve: the root, the residual of the defining
/// equation at the root, and iteration diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RootSolve {
    #[serde(with = "f64_str")]
    pub root: f64,
    #[serde(with = "f64_str")]
    pub residual: f64,
    pub iterations: u32,
    #[serde(serialize_with = "bracket_as_strings")]
    pub bracket: (f64, f64),
}

fn bracket_as_strings<S: Serializer>(bracket: &(f64, f64), s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq([format!("{:?}", bracket.0), format!("{:?}", bracket.1)])
}

/// Hybrid bracketed root finder: bisection down to width `1e-3`, then
/// bracket-safeguarded secant iteration until the function value underflows
/// or the bracket narrows to a few ulps. Derivative-free and robust next to
/// the tangent singularity.
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<RootSolve> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Solve(format!(
            "non-finite endpoint values on [{a}, {b}]: f(lo) = {fa}, f(hi) = {fb}"
        )));
    }
    if fa == 0.0 {
        return Ok(RootSolve { root: a, residual: 0.0, iterations: 0, bracket: (lo, hi) });
    }
    if fb == 0.0 {
        return Ok(RootSolve { root: b, residual: 0.0, iterations: 0, bracket: (lo, hi) });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Solve(format!(
            "no sign change on bracket [{a}, {b}]: f(lo) = {fa}, f(hi) = {fb}"
        )));
    }
    let mut iterations = 0u32;

    // Phase 1: plain bisection to a short interval.
    while b - a > 1e-3 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(RootSolve { root: m, residual: 0.0, iterations, bracket: (lo, hi) });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }

    // Phase 2: secant steps, safeguarded by the bracket; fall back to
    // bisection whenever the secant step leaves the interval or stalls.
    loop {
        let width_limit = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0);
        if b - a <= width_limit || iterations >= 200 {
            let root = if fa.abs() <= fb.abs() { a } else { b };
            let residual = fa.abs().min(fb.abs());
            return Ok(RootSolve { root, residual, iterations, bracket: (lo, hi) });
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let m = if secant.is_finite() && secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        // Guard against stalling on an endpoint.
        let m = if m <= a || m >= b { 0.5 * (a + b) } else { m };
        let fm = f(m);
        iterations += 1;
        if fm == 0.0 {
            return Ok(RootSolve { root: m, residual: 0.0, iterations, bracket: (lo, hi) });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
}

/// The threshold parameter `b0`: the unique solution of `tan(b) = 2b` in
/// `(1.0, 1.5)`. Cached after the first computation.
pub fn solve_b0() -> f64 {
    static B0: OnceLock<f64> = OnceLock::new();
    *B0.get_or_init(|| {
        find_root(|x| x.tan() - 2.0 * x, 1.0, 1.5)
            .expect("tan(x) - 2x changes sign once on (1.0, 1.5)")
            .root
    })
}

/// Cap parameter of conformal type `beta`: inverts `beta = 2 artanh(sin b)`,
/// i.e. `b = gd(beta/2)`. Valid for every `beta > 0`.
pub fn cap_b_from_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!("conformal type must be positive, got {beta}")));
    }
    Ok((0.5 * beta).tanh().asin())
}

/// Conformal type of the glide-class extremal band metric with cap angle
/// `omega` (and band parameter `b = tan(omega) - omega`):
/// `beta = 2 artanh(sin omega) + 2 (tan(omega) - 2 omega)/cos(omega)`.
pub fn sigma_v_beta_of_omega(omega: f64) -> f64 {
    2.0 * inverse_gudermannian(omega) + 2.0 * (omega.tan() - 2.0 * omega) / omega.cos()
}

/// Band parameter paired with `omega` for the glide-class family:
/// `b = tan(omega) - omega`.
pub fn sigma_v_b_of_omega(omega: f64) -> f64 {
    omega.tan() - omega
}

/// Inverts [`sigma_v_beta_of_omega`] on `[b0, pi/2)`. Requires `beta` at or
/// above the regime threshold `sigma_v_beta_of_omega(b0) = 2 artanh(sin b0)`.
pub fn omega_from_beta_sigma_v(beta: f64) -> Result<RootSolve> {
    let b0 = solve_b0();
    let threshold = 2.0 * inverse_gudermannian(b0);
    if !(beta >= threshold * (1.0 - 1e-14)) {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} is below the band-regime threshold {threshold}"
        )));
    }
    verify_increasing_sigma_v()?;
    // At b0 the band term 2(tan w - 2w)/cos w vanishes only up to the
    // rounding of b0 itself, so the map value at the bracket's low end can
    // sit a few ulps on either side of the canonical threshold; a beta in
    // that sliver belongs to the degenerate band with omega = b0.
    let at_b0 = sigma_v_beta_of_omega(b0);
    if beta <= at_b0 {
        return Ok(RootSolve {
            root: b0,
            residual: at_b0 - beta,
            iterations: 0,
            bracket: (b0, b0),
        });
    }
    invert_increasing(sigma_v_beta_of_omega, beta, b0, FRAC_PI_2 - SINGULARITY_GUARD)
}

/// Band parameter for the product-class extremal of cap angle `omega`:
/// `q(omega) = tan(omega) + sqrt(tan^2(omega) - omega tan(omega) + omega^2)`.
pub fn sigma_v_h_b_of_omega(omega: f64) -> f64 {
    let t = omega.tan();
    t + (t * t - omega * t + omega * omega).sqrt()
}

/// Conformal type of the product-class extremal with cap angle `omega`:
/// `beta = 2 artanh(sin omega) + 2 (q(omega) - omega)/cos(omega)`.
pub fn sigma_v_h_beta_of_omega(omega: f64) -> f64 {
    2.0 * inverse_gudermannian(omega)
        + 2.0 * (sigma_v_h_b_of_omega(omega) - omega) / omega.cos()
}

/// Inverts [`sigma_v_h_beta_of_omega`] on `(0, pi/2)`; defined for every
/// `beta > 0` (single regime).
pub fn omega_from_beta_sigma_v_h(beta: f64) -> Result<RootSolve> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!("conformal type must be positive, got {beta}")));
    }
    verify_increasing_sigma_v_h()?;
    // beta(omega) ~ 4 omega near zero, so beta/8 is a safe lower start.
    let mut lo = (beta / 8.0).min(0.1);
    while sigma_v_h_beta_of_omega(lo) >= beta {
        lo *= 0.25;
        if lo < 1e-300 {
            return Err(Error::Solve(format!("failed to bracket omega below for beta = {beta}")));
        }
    }
    invert_increasing(sigma_v_h_beta_of_omega, beta, lo, FRAC_PI_2 - SINGULARITY_GUARD)
}

/// Band parameter of the vertical-class extremal, linear in the conformal
/// type: `b = pi/3 + (beta - 2 ln(2+sqrt 3))/4`. Requires
/// `beta >= 2 ln(2+sqrt 3)`.
pub fn b_from_beta_sigma_n_v(beta: f64) -> Result<f64> {
    let threshold = 2.0 * (2.0 + 3.0f64.sqrt()).ln();
    if !(beta >= threshold) {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} is below the band-regime threshold {threshold}"
        )));
    }
    Ok(FRAC_PI_3 + 0.25 * (beta - threshold))
}

/// Shared inversion driver for a strictly increasing map: expands the upper
/// end toward `pi/2` until the target is bracketed, then runs the hybrid
/// finder.
fn invert_increasing<F: Fn(f64) -> f64>(
    map: F,
    beta: f64,
    lo: f64,
    hi_max: f64,
) -> Result<RootSolve> {
    let mut hi = (lo + 0.5).min(hi_max);
    while map(hi) < beta {
        if hi >= hi_max {
            return Err(Error::Solve(format!(
                "conformal type {beta} is not reached below the bracket cap {hi_max}"
            )));
        }
        hi = (hi_max - 0.25 * (hi_max - hi)).min(hi_max);
    }
    find_root(|omega| map(omega) - beta, lo, hi)
}

/// One-time dense monotonicity scan of an increasing map; failures indicate
/// a transcription bug in the map and abort inversion.
fn scan_increasing<F: Fn(f64) -> f64>(map: F, lo: f64, hi: f64, n: usize) -> Option<String> {
    let mut prev = map(lo);
    for k in 1..=n {
        let x = lo + (hi - lo) * k as f64 / n as f64;
        let y = map(x);
        if !(y > prev) {
            return Some(format!("map fails to increase between {} and {x}: {prev} vs {y}", x
                - (hi - lo) / n as f64));
        }
        prev = y;
    }
    None
}

fn verify_increasing_sigma_v() -> Result<()> {
    static SCAN: OnceLock<Option<String>> = OnceLock::new();
    let failure = SCAN.get_or_init(|| {
        scan_increasing(sigma_v_beta_of_omega, solve_b0(), FRAC_PI_2 - SINGULARITY_GUARD, 4096)
    });
    match failure {
        None => Ok(()),
        Some(msg) => Err(Error::Monotonicity(format!("glide-class conformal-type map: {msg}"))),
    }
}

fn verify_increasing_sigma_v_h() -> Result<()> {
    static SCAN: OnceLock<Option<String>> = OnceLock::new();
    let failure = SCAN.get_or_init(|| {
        scan_increasing(sigma_v_h_beta_of_omega, 1e-6, FRAC_PI_2 - SINGULARITY_GUARD, 4096)
    });
    match failure {
        None => Ok(()),
        Some(msg) => Err(Error::Monotonicity(format!("product-class conformal-type map: {msg}"))),
    }
}

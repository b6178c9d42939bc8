//! Optimal conformal constants for the five inequality families, with regime
//! dispatch, threshold continuity, and full parameter provenance.

use crate::error::{Error, Result};
use crate::extremal::{Inequality, Regime};
use crate::geometry::inverse_gudermannian;
use crate::io::f64_str;
use crate::solvers;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_3, PI};

/// An optimal constant together with where it came from: the family, the
/// conformal type, the regime, and the resolved parameters (`omega`, `b` for
/// band regimes; `x = tanh(beta/2)` for spherical regimes).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConstantResult {
    #[serde(rename = "theorem")]
    pub inequality: Inequality,
    #[serde(with = "f64_str")]
    pub beta: f64,
    pub regime: Regime,
    #[serde(rename = "C", with = "f64_str")]
    pub c: f64,
    #[serde(with = "f64_str::optional")]
    pub omega: Option<f64>,
    #[serde(with = "f64_str::optional")]
    pub b: Option<f64>,
    #[serde(with = "f64_str::optional")]
    pub x: Option<f64>,
}

/// Regime threshold of a family's conformal type, as a lazily evaluated
/// exact expression (`None` for the single-regime product family).
pub fn threshold(inequality: Inequality) -> Option<f64> {
    match inequality {
        Inequality::SigmaV => Some(2.0 * inverse_gudermannian(solvers::solve_b0())),
        Inequality::SigmaNV => Some(2.0 * (2.0 + 3.0f64.sqrt()).ln()),
        Inequality::SigmaVH => None,
        // Moebius thresholds are half the Klein ones (double-cover halving).
        Inequality::MobiusSigmaV => threshold(Inequality::SigmaV).map(|t| 0.5 * t),
        Inequality::MobiusSysV => threshold(Inequality::SigmaNV).map(|t| 0.5 * t),
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!("conformal type must be positive, got {beta}")));
    }
    Ok(())
}

/// Spherical-regime constant `arcsin(x)/x` with `x = tanh(beta/2)`
/// (equivalently `(e^beta - 1)/(e^beta + 1)`).
fn spherical_constant(beta: f64) -> (f64, f64) {
    let x = (0.5 * beta).tanh();
    let c = if x == 0.0 { 1.0 } else { x.asin() / x };
    (c, x)
}

/// Optimal constant of the glide x vertical family:
/// `l_sigma * l_v <= C(beta) vol`.
pub fn c_sigma_v(beta: f64) -> Result<ConstantResult> {
    check_beta(beta)?;
    let t = threshold(Inequality::SigmaV).expect("two-regime family");
    if beta <= t {
        let (c, x) = spherical_constant(beta);
        let b = solvers::cap_b_from_beta(beta)?;
        Ok(ConstantResult {
            inequality: Inequality::SigmaV,
            beta,
            regime: Regime::Spherical,
            c,
            omega: None,
            b: Some(b),
            x: Some(x),
        })
    } else {
        let omega = solvers::omega_from_beta_sigma_v(beta)?.root;
        let b = solvers::sigma_v_b_of_omega(omega);
        Ok(ConstantResult {
            inequality: Inequality::SigmaV,
            beta,
            regime: Regime::FlatSpherical,
            c: 0.5 / omega.cos(),
            omega: Some(omega),
            b: Some(b),
            x: None,
        })
    }
}

/// Band-regime constant of the subgroup x vertical family, as the published
/// rational function of `beta`.
fn sigma_n_v_band_constant(beta: f64) -> f64 {
    let ln_t = (2.0 + 3.0f64.sqrt()).ln();
    (2.0 / 3.0) * (3.0 * beta + 4.0 * PI - 6.0 * ln_t) / (4.0 * 3.0f64.sqrt() + beta - 2.0 * ln_t)
}

/// Optimal constant of the subgroup x vertical family:
/// `min(l_sigma, l_h) * l_v <= C(beta) vol`.
pub fn c_sigma_n_v(beta: f64) -> Result<ConstantResult> {
    check_beta(beta)?;
    let t = threshold(Inequality::SigmaNV).expect("two-regime family");
    if beta <= t {
        let (c, x) = spherical_constant(beta);
        let b = solvers::cap_b_from_beta(beta)?;
        Ok(ConstantResult {
            inequality: Inequality::SigmaNV,
            beta,
            regime: Regime::Spherical,
            c,
            omega: None,
            b: Some(b),
            x: Some(x),
        })
    } else {
        let b = solvers::b_from_beta_sigma_n_v(beta)?;
        Ok(ConstantResult {
            inequality: Inequality::SigmaNV,
            beta,
            regime: Regime::FlatSpherical,
            c: sigma_n_v_band_constant(beta),
            omega: Some(FRAC_PI_3),
            b: Some(b),
            x: None,
        })
    }
}

/// The published closed form of the product-family constant at parameters
/// `(omega, b)`: quartic radicand to the 1/4 power.
pub fn product_constant_published(omega: f64, b: f64) -> f64 {
    let radicand = b.powi(4) - 4.0 * b * omega + omega * omega + omega.powi(4)
        - 2.0 * b * b * (omega * omega - 2.0);
    (PI.sqrt() / (3.0 * 3.0f64.sqrt())) * radicand.powf(0.25) * (2.0 * b - omega)
        / ((b - omega) * ((b - omega) * b).sqrt())
}

/// Simplified equivalent of [`product_constant_published`], valid on the
/// constraint curve `tan(omega) = (b^2 - omega^2)/(2b - omega)`:
/// `sqrt(pi) (2b - omega)^{3/2} / (3 sqrt(3) sqrt(cos omega) sqrt(b) (b - omega)^{3/2})`.
pub fn product_constant_simplified(omega: f64, b: f64) -> f64 {
    PI.sqrt() * (2.0 * b - omega).powf(1.5)
        / (3.0 * 3.0f64.sqrt() * omega.cos().sqrt() * b.sqrt() * (b - omega).powf(1.5))
}

/// Optimal constant of the three-length product family:
/// `l_sigma * l_v * l_h <= C(beta) vol^{3/2}`. Single regime.
pub fn c_sigma_v_h(beta: f64) -> Result<ConstantResult> {
    check_beta(beta)?;
    let omega = solvers::omega_from_beta_sigma_v_h(beta)?.root;
    let b = solvers::sigma_v_h_b_of_omega(omega);
    Ok(ConstantResult {
        inequality: Inequality::SigmaVH,
        beta,
        regime: Regime::FlatSpherical,
        c: product_constant_published(omega, b),
        omega: Some(omega),
        b: Some(b),
        x: None,
    })
}

/// Optimal constant of the Moebius glide x vertical family; equals the Klein
/// glide x vertical constant at the doubled conformal type.
pub fn c_mobius_sigma_v(beta: f64) -> Result<ConstantResult> {
    check_beta(beta)?;
    let klein = c_sigma_v(2.0 * beta)?;
    Ok(ConstantResult { inequality: Inequality::MobiusSigmaV, beta, ..klein })
}

/// Optimal constant of the Moebius systole x vertical family; equals the
/// Klein subgroup x vertical constant at the doubled conformal type.
pub fn c_mobius_sys_v(beta: f64) -> Result<ConstantResult> {
    check_beta(beta)?;
    let klein = c_sigma_n_v(2.0 * beta)?;
    Ok(ConstantResult { inequality: Inequality::MobiusSysV, beta, ..klein })
}

/// Dispatch on the family.
pub fn constant_for(inequality: Inequality, beta: f64) -> Result<ConstantResult> {
    match inequality {
        Inequality::SigmaV => c_sigma_v(beta),
        Inequality::SigmaNV => c_sigma_n_v(beta),
        Inequality::SigmaVH => c_sigma_v_h(beta),
        Inequality::MobiusSigmaV => c_mobius_sigma_v(beta),
        Inequality::MobiusSysV => c_mobius_sys_v(beta),
    }
}

/// Evenly spaced sweep of a family's constant over `[beta_min, beta_max]`.
pub fn sweep(
    inequality: Inequality,
    beta_min: f64,
    beta_max: f64,
    steps: usize,
) -> Result<Vec<ConstantResult>> {
    if !(beta_min > 0.0) || !(beta_max >= beta_min) {
        return Err(Error::OutOfRange(format!(
            "sweep range must satisfy 0 < beta_min <= beta_max, got [{beta_min}, {beta_max}]"
        )));
    }
    if steps < 1 {
        return Err(Error::OutOfRange("sweep needs at least one step".into()));
    }
    let mut out = Vec::with_capacity(steps);
    for k in 0..steps {
        let beta = if steps == 1 {
            beta_min
        } else {
            beta_min + (beta_max - beta_min) * k as f64 / (steps - 1) as f64
        };
        out.push(constant_for(inequality, beta)?);
    }
    Ok(out)
}

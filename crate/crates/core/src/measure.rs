//! Curve-family measures and extremal-length certificates.
//!
//! A conformal upper bound `l_1(g)...l_p(g) <= C vol(g)^{p/2}` is certified
//! by exhibiting measures `mu_1..mu_p` on the p homotopy classes whose
//! pushforward under arc length equals the extremal area measure
//! (`<*mu, phi> = integral of phi dA` for test functions `phi`) and whose
//! weighted masses agree (`m_1 l_1 = ... = m_p l_p`). The constant is then
//! `C = vol^{p/2} / (p^p m_1...m_p)`.
//!
//! The families on a flat-spherical metric (profile `cos v` on `|v| <= w`,
//! `cos w` on the band, mirrored cap at the far seam):
//!
//! * great circles of the two spherical caps, density `h(a) da (x) dtheta`
//!   with `(theta, a) in [0, pi) x (-w, w)` per cap — each circle counted
//!   once, since the `a < 0` circle at `theta` equals the `a > 0` circle at
//!   `theta + pi`;
//! * vertical meridians, uniform density `(m'/pi) du`;
//! * horizontal band circles, uniform density `(1 - m'/(pi cos w)) da` over
//!   `a in [w, 2b - w]` — one parameter per circle; each circle winds twice
//!   around `u` and so covers both rows `+-a` of the fundamental domain.
//!
//! With the unified density
//! `h(a) = (sin a / (pi cos a)) (cos^2 a - (m'/pi) cos w) / sqrt(cos^2 a - cos^2 w)`
//! the combined pushforward equals the area measure for EVERY admissible
//! `m' in [0, pi cos w]`; the choice of `m'` only moves mass between the
//! families. The mass-balance conditions then pin `m'` per theorem.

use crate::error::{Error, Result};
use crate::extremal::{self, Inequality};
use crate::geometry::ProfileMetric;
use crate::io::f64_str;
use crate::quad;
use crate::solvers;
use crate::systole::{length_closed_form, GreatCircle, HomotopyClass};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which curve family a measure lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Cap great circles (both caps), glide class, each of length `pi`.
    GreatCircles,
    /// Vertical meridians, length `2V = 4b`.
    Verticals,
    /// Band circles, horizontal class, each of length `2 pi cos w`.
    Horizontals,
}

/// A measure on one curve family of a flat-spherical metric with cap angle
/// `omega`, half-height parameter `b` (so `V = 2b`), and vertical weight
/// `m_prime`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CurveFamilyMeasure {
    pub family: FamilyKind,
    #[serde(with = "f64_str")]
    pub omega: f64,
    #[serde(with = "f64_str")]
    pub b: f64,
    #[serde(with = "f64_str")]
    pub m_prime: f64,
    /// Total mass, in closed form.
    #[serde(with = "f64_str")]
    pub mass: f64,
}

fn validate_params(omega: f64, b: f64, m_prime: f64) -> Result<()> {
    if !(omega > 0.0 && omega < PI / 2.0) {
        return Err(Error::OutOfRange(format!(
            "cap angle must lie in (0, pi/2), got {omega}"
        )));
    }
    if !(b >= omega) {
        return Err(Error::OutOfRange(format!(
            "half-height parameter must satisfy b >= omega, got b = {b}, omega = {omega}"
        )));
    }
    if !(0.0..=PI * omega.cos() + 1e-15).contains(&m_prime) {
        return Err(Error::OutOfRange(format!(
            "vertical weight must lie in [0, pi cos omega] = [0, {}], got {m_prime} \
             (larger values make the circle density negative)",
            PI * omega.cos()
        )));
    }
    Ok(())
}

impl CurveFamilyMeasure {
    pub fn great_circles(omega: f64, b: f64, m_prime: f64) -> Result<Self> {
        validate_params(omega, b, m_prime)?;
        let (m1, _, _) = family_masses(omega, b, m_prime);
        Ok(Self { family: FamilyKind::GreatCircles, omega, b, m_prime, mass: m1 })
    }

    pub fn verticals(omega: f64, b: f64, m_prime: f64) -> Result<Self> {
        validate_params(omega, b, m_prime)?;
        let (_, m2, _) = family_masses(omega, b, m_prime);
        Ok(Self { family: FamilyKind::Verticals, omega, b, m_prime, mass: m2 })
    }

    pub fn horizontals(omega: f64, b: f64, m_prime: f64) -> Result<Self> {
        validate_params(omega, b, m_prime)?;
        let (_, _, m3) = family_masses(omega, b, m_prime);
        Ok(Self { family: FamilyKind::Horizontals, omega, b, m_prime, mass: m3 })
    }

    /// Closed-form length of every curve in the family.
    pub fn curve_length(&self) -> f64 {
        match self.family {
            FamilyKind::GreatCircles => PI,
            FamilyKind::Verticals => 4.0 * self.b,
            FamilyKind::Horizontals => 2.0 * PI * self.omega.cos(),
        }
    }

    /// The homotopy class the curves realize.
    pub fn class(&self) -> HomotopyClass {
        match self.family {
            FamilyKind::GreatCircles => HomotopyClass::Sigma,
            FamilyKind::Verticals => HomotopyClass::Vertical,
            FamilyKind::Horizontals => HomotopyClass::Horizontal,
        }
    }
}

/// Unified circle density
/// `h(a) = (sin a / (pi cos a)) (cos^2 a - (m'/pi) cos w) / sqrt(cos^2 a - cos^2 w)`.
///
/// At `m' = pi cos w` this reduces to
/// `(sin a / (pi cos a)) sqrt(cos^2 a - cos^2 w)`, the pure-cap special
/// case; the singularity at `a -> w` is integrable.
pub fn h_density(a: f64, omega: f64, m_prime: f64) -> Result<f64> {
    if !(0.0..PI / 2.0).contains(&omega) || omega == 0.0 {
        return Err(Error::OutOfRange(format!("cap angle out of range: {omega}")));
    }
    if !(0.0..=PI * omega.cos()).contains(&m_prime) {
        return Err(Error::OutOfRange(format!("vertical weight out of range: {m_prime}")));
    }
    if !(0.0..omega).contains(&a) {
        return Err(Error::OutOfRange(format!(
            "latitude must satisfy 0 <= a < omega = {omega}, got {a}"
        )));
    }
    let k = m_prime / PI * omega.cos();
    let ca2 = a.cos() * a.cos();
    let cw2 = omega.cos() * omega.cos();
    Ok(a.sin() / (PI * a.cos()) * (ca2 - k) / (ca2 - cw2).sqrt())
}

/// Closed-form family masses:
/// `m1 = 4 sin w - 4 m' w / pi` (circles, both caps and both latitude
/// signs), `m2 = m'` (verticals), `m3 = 2(b - w)(1 - m'/(pi cos w))`
/// (band circles).
pub fn family_masses(omega: f64, b: f64, m_prime: f64) -> (f64, f64, f64) {
    let m1 = 4.0 * omega.sin() - 4.0 * m_prime * omega / PI;
    let m2 = m_prime;
    let m3 = 2.0 * (b - omega) * (1.0 - m_prime / (PI * omega.cos()));
    (m1, m2, m3)
}

/// Reduce `v` into the fundamental range `[-2b, 2b]` by vertical periods.
fn reduce_v(mut v: f64, b: f64) -> f64 {
    let period = 4.0 * b;
    while v > 2.0 * b {
        v -= period;
    }
    while v < -2.0 * b {
        v += period;
    }
    v
}

/// Reduce `(u, v)` into the fundamental domain `u in [-pi/2, pi/2]` using
/// the glide identification `(u, v) ~ (u - pi, -v)`.
fn reduce_u(mut u: f64, mut v: f64) -> (f64, f64) {
    while u > PI / 2.0 {
        u -= PI;
        v = -v;
    }
    while u < -PI / 2.0 {
        u += PI;
        v = -v;
    }
    (u, v)
}

/// One quadrature node on a curve of the family: a fundamental-domain
/// point and its total weight (measure density x quadrature weights x
/// arc-length element).
struct WeightedPoint {
    u: f64,
    v: f64,
    w: f64,
}

const N_THETA: usize = 96;
const N_SINGULAR: usize = 64;
const N_CURVE: usize = 48;
const N_V: usize = 64;

/// Sample the family into weighted points so that
/// `<*mu, phi> ~= sum w_i phi(u_i, v_i)`.
fn family_points(m: &CurveFamilyMeasure) -> Vec<WeightedPoint> {
    let (omega, b, mp) = (m.omega, m.b, m.m_prime);
    let mut pts = Vec::new();
    match m.family {
        FamilyKind::GreatCircles => {
            // (theta, a) in [0, pi) x (-w, w) per cap, two caps. The
            // singular latitude integral uses sin a = sin w sin t, under
            // which h(a) da = (sin w sin t / pi)
            // (1 - sin^2 w sin^2 t - k) / (1 - sin^2 w sin^2 t) dt
            // with k = (m'/pi) cos w — analytic on [0, pi/2].
            let sw = omega.sin();
            let k = mp / PI * omega.cos();
            let gl_t = quad::gauss_legendre(N_SINGULAR);
            let gl_u = quad::gauss_legendre(N_CURVE);
            let theta_w = PI / N_THETA as f64;
            for cap_top in [false, true] {
                for i in 0..N_THETA {
                    let theta = (i as f64 + 0.5) * theta_w;
                    for sign in [1.0f64, -1.0] {
                        for (&tj, &twj) in gl_t.0.iter().zip(gl_t.1.iter()) {
                            // Map GL nodes from [-1, 1] to t in [0, pi/2].
                            let t = (tj + 1.0) * (PI / 4.0);
                            let tw = twj * (PI / 4.0);
                            let s = sw * t.sin();
                            let a = s.asin();
                            let density = s / PI * (1.0 - s * s - k) / (1.0 - s * s);
                            let circle = GreatCircle { theta, a: sign * a };
                            // Curve quadrature over u in [theta - pi/2,
                            // theta + pi/2].
                            for (&uj, &uwj) in gl_u.0.iter().zip(gl_u.1.iter()) {
                                let u = theta + uj * (PI / 2.0);
                                let uw = uwj * (PI / 2.0);
                                let vc = circle.latitude(u);
                                let speed = circle.speed(u);
                                let v = if cap_top { reduce_v(2.0 * b - vc, b) } else { vc };
                                let (ur, vr) = reduce_u(u, v);
                                pts.push(WeightedPoint {
                                    u: ur,
                                    v: vr,
                                    w: theta_w * density * tw * speed * uw,
                                });
                            }
                        }
                    }
                }
            }
        }
        FamilyKind::Verticals => {
            // (m'/pi) du over the seam-to-seam meridians; each meridian is
            // integrated in v with the nodes split at the profile kinks.
            let gl_u = quad::gauss_legendre(N_CURVE);
            let gl_v = quad::gauss_legendre(N_V);
            let breaks = [-2.0 * b, -(2.0 * b - omega), -omega, omega, 2.0 * b - omega, 2.0 * b];
            for (&uj, &uwj) in gl_u.0.iter().zip(gl_u.1.iter()) {
                let u = uj * (PI / 2.0);
                let uw = uwj * (PI / 2.0);
                for seg in breaks.windows(2) {
                    let (lo, hi) = (seg[0], seg[1]);
                    let half = 0.5 * (hi - lo);
                    let mid = 0.5 * (hi + lo);
                    for (&vj, &vwj) in gl_v.0.iter().zip(gl_v.1.iter()) {
                        pts.push(WeightedPoint {
                            u,
                            v: mid + half * vj,
                            w: mp / PI * uw * half * vwj,
                        });
                    }
                }
            }
        }
        FamilyKind::Horizontals => {
            // (1 - m'/(pi cos w)) da over a in [w, 2b - w]; each circle has
            // arc element cos w du and covers both rows +-a as u runs its
            // full 2 pi period.
            let density = 1.0 - mp / (PI * omega.cos());
            if density == 0.0 || b == omega {
                return pts;
            }
            let gl_a = quad::gauss_legendre(N_V);
            let gl_u = quad::gauss_legendre(N_CURVE);
            let (lo, hi) = (omega, 2.0 * b - omega);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&aj, &awj) in gl_a.0.iter().zip(gl_a.1.iter()) {
                let a = mid + half * aj;
                let aw = half * awj;
                for row in [a, -a] {
                    for (&uj, &uwj) in gl_u.0.iter().zip(gl_u.1.iter()) {
                        let u = uj * (PI / 2.0);
                        let uw = uwj * (PI / 2.0);
                        pts.push(WeightedPoint {
                            u,
                            v: row,
                            w: density * aw * omega.cos() * uw,
                        });
                    }
                }
            }
        }
    }
    pts
}

/// Numerically evaluate `<*mu, phi> = integral over curves of
/// (integral of phi along the curve, arc length) d mu`.
pub fn pushforward_pair<F: Fn(f64, f64) -> f64>(m: &CurveFamilyMeasure, phi: F) -> f64 {
    family_points(m).iter().map(|p| p.w * phi(p.u, p.v)).sum()
}

/// `integral of phi dA` over the fundamental domain of a profile metric,
/// split at the profile kinks.
pub fn area_integral<F: Fn(f64, f64) -> f64>(metric: &ProfileMetric, phi: F) -> f64 {
    let v_max = metric.v_half_height();
    let mut breaks: Vec<f64> = vec![-v_max];
    for k in metric.kinks() {
        // Kinks are reported on (0, V); the profile is even, so both signs
        // bound smooth segments.
        if k < v_max {
            breaks.push(k);
            breaks.push(-k);
        }
    }
    breaks.push(v_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let gl_u = quad::gauss_legendre(N_CURVE);
    let gl_v = quad::gauss_legendre(N_V);
    let mut total = 0.0;
    for (&uj, &uwj) in gl_u.0.iter().zip(gl_u.1.iter()) {
        let u = uj * (PI / 2.0);
        let uw = uwj * (PI / 2.0);
        for seg in breaks.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (&vj, &vwj) in gl_v.0.iter().zip(gl_v.1.iter()) {
                let v = mid + half * vj;
                total += uw * half * vwj * phi(u, v) * metric.profile(v);
            }
        }
    }
    total
}

/// The fixed test-function suite probing the pushforward identity:
/// v-dependent functions probe the latitude (Abel) structure, the
/// u-dependent one probes averaging over circle longitudes, and the bump
/// isolates the flat band.
pub fn test_suite(omega: f64, b: f64) -> Vec<(&'static str, Box<dyn Fn(f64, f64) -> f64 + Sync>)> {
    let band_mid = b;
    let band_halfwidth = 0.8 * (b - omega).max(1e-12);
    vec![
        ("one", Box::new(|_, _| 1.0)),
        ("cos-v", Box::new(|_, v: f64| v.cos())),
        ("cos2-v", Box::new(|_, v: f64| v.cos() * v.cos())),
        ("v-squared", Box::new(|_, v: f64| v * v)),
        ("gauss-v", Box::new(|_, v: f64| (-v * v).exp())),
        ("sin2u-cos-v", Box::new(|u: f64, v: f64| u.sin() * u.sin() * v.cos())),
        (
            "band-bump",
            Box::new(move |_, v: f64| {
                let s = (v.abs() - band_mid) / band_halfwidth;
                if s.abs() < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }),
        ),
    ]
}

/// Quadrature and validity tolerances for a certificate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ToleranceSpec {
    /// Relative tolerance on the pushforward residual (scaled by volume).
    #[serde(with = "f64_str")]
    pub tol_push: f64,
    /// Relative tolerance on the weighted-mass spread.
    #[serde(with = "f64_str")]
    pub tol_mass: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self { tol_push: 1e-3, tol_mass: 1e-10 }
    }
}

/// One inequality factor: the curves' class, the measure mass backing it,
/// and the closed-form length at the extremal metric.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MassGroup {
    pub class: String,
    #[serde(with = "f64_str")]
    pub mass: f64,
    #[serde(with = "f64_str")]
    pub length: f64,
    /// `mass * length`; the groups of a valid certificate share this value.
    #[serde(with = "f64_str")]
    pub weighted: f64,
}

/// Residual of the pushforward identity on one test function.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PushResidual {
    pub name: String,
    #[serde(with = "f64_str")]
    pub residual: f64,
}

/// The certified bound: measures, residuals, and the resulting constant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundCertificate {
    #[serde(rename = "theorem")]
    pub inequality: Inequality,
    #[serde(with = "f64_str")]
    pub beta: f64,
    #[serde(with = "f64_str")]
    pub omega: f64,
    #[serde(with = "f64_str")]
    pub b: f64,
    #[serde(with = "f64_str")]
    pub m_prime: f64,
    #[serde(with = "f64_str")]
    pub volume: f64,
    pub p: u32,
    pub groups: Vec<MassGroup>,
    /// Max over the suite of `|<*mu, phi> - integral phi dA| / vol`.
    #[serde(with = "f64_str")]
    pub eps_push: f64,
    /// Relative spread of the weighted masses.
    #[serde(with = "f64_str")]
    pub eps_mass: f64,
    #[serde(with = "f64_str")]
    pub tol_push: f64,
    #[serde(with = "f64_str")]
    pub tol_mass: f64,
    #[serde(rename = "C", with = "f64_str")]
    pub c: f64,
    pub valid: bool,
    pub push_residuals: Vec<PushResidual>,
}

/// The extremal metric and measure families certifying an inequality at
/// conformal type `beta`. Only the flat-spherical regimes carry a measure
/// construction; spherical-regime and Moebius requests are refused.
pub fn certificate_setup(
    inequality: Inequality,
    beta: f64,
) -> Result<(ProfileMetric, Vec<CurveFamilyMeasure>)> {
    if inequality.is_mobius() {
        return Err(Error::OutOfRange(format!(
            "no direct measure construction for {inequality}; certify the \
             orientable double cover at twice the conformal type instead"
        )));
    }
    let (omega, b, m_prime) = match inequality {
        Inequality::SigmaV => {
            let omega = solvers::omega_from_beta_sigma_v(beta)?.root;
            let b = solvers::sigma_v_b_of_omega(omega);
            (omega, b, PI * omega.cos())
        }
        Inequality::SigmaNV => {
            let b = solvers::b_from_beta_sigma_n_v(beta)?;
            let omega = PI / 3.0;
            (omega, b, PI * (3.0f64.sqrt() + b - PI / 3.0) / (4.0 * b))
        }
        Inequality::SigmaVH => {
            let omega = solvers::omega_from_beta_sigma_v_h(beta)?.root;
            let b = solvers::sigma_v_h_b_of_omega(omega);
            (omega, b, PI * omega.sin() / (b + omega))
        }
        Inequality::MobiusSigmaV | Inequality::MobiusSysV => unreachable!(),
    };
    let metric = extremal::band_extremal(omega, b)?;
    let families = vec![
        CurveFamilyMeasure::great_circles(omega, b, m_prime)?,
        CurveFamilyMeasure::verticals(omega, b, m_prime)?,
        CurveFamilyMeasure::horizontals(omega, b, m_prime)?,
    ];
    Ok((metric, families))
}

/// Build and check a certificate from explicit families.
pub fn certify(
    inequality: Inequality,
    metric: &ProfileMetric,
    families: &[CurveFamilyMeasure],
    tol: ToleranceSpec,
) -> Result<BoundCertificate> {
    let first = families.first().ok_or_else(|| {
        Error::OutOfRange("a certificate needs at least one curve family".into())
    })?;
    let (omega, b, m_prime) = (first.omega, first.b, first.m_prime);
    let volume = metric.volume();
    let beta = metric.conformal_type();

    let find = |kind: FamilyKind| -> Result<&CurveFamilyMeasure> {
        families.iter().find(|f| f.family == kind).ok_or_else(|| {
            Error::OutOfRange(format!("certificate for {inequality} is missing a family"))
        })
    };
    let circles = find(FamilyKind::GreatCircles)?;
    let verticals = find(FamilyKind::Verticals)?;

    let length_of = |class: HomotopyClass| length_closed_form(class, metric);
    let groups: Vec<MassGroup> = match inequality {
        Inequality::SigmaV => vec![
            group(HomotopyClass::Sigma.slug(), circles.mass, length_of(HomotopyClass::Sigma)?),
            group(HomotopyClass::Vertical.slug(), verticals.mass, length_of(HomotopyClass::Vertical)?),
        ],
        Inequality::SigmaNV => {
            // The glide circles and the band circles share their length at
            // omega = pi/3 (pi = 2 pi cos omega); together they back the
            // min(l_sigma, l_h) factor.
            let horizontals = find(FamilyKind::Horizontals)?;
            let l_sigma = length_of(HomotopyClass::Sigma)?;
            let l_h = length_of(HomotopyClass::Horizontal)?;
            if (l_sigma - l_h).abs() > 1e-12 * l_sigma {
                return Err(Error::OutOfRange(format!(
                    "merged circle family needs equal lengths, got {l_sigma} vs {l_h}"
                )));
            }
            vec![
                group("sigma+h", circles.mass + horizontals.mass, l_sigma),
                group(HomotopyClass::Vertical.slug(), verticals.mass, length_of(HomotopyClass::Vertical)?),
            ]
        }
        Inequality::SigmaVH => {
            let horizontals = find(FamilyKind::Horizontals)?;
            vec![
                group(HomotopyClass::Sigma.slug(), circles.mass, length_of(HomotopyClass::Sigma)?),
                group(HomotopyClass::Vertical.slug(), verticals.mass, length_of(HomotopyClass::Vertical)?),
                group(HomotopyClass::Horizontal.slug(), horizontals.mass, length_of(HomotopyClass::Horizontal)?),
            ]
        }
        Inequality::MobiusSigmaV | Inequality::MobiusSysV => {
            return Err(Error::OutOfRange(format!(
                "no direct measure construction for {inequality}"
            )));
        }
    };

    let p = groups.len() as u32;
    let w_max = groups.iter().map(|g| g.weighted).fold(f64::NEG_INFINITY, f64::max);
    let w_min = groups.iter().map(|g| g.weighted).fold(f64::INFINITY, f64::min);
    let eps_mass = (w_max - w_min) / w_max;

    // Pushforward residuals over the suite; the family points are sampled
    // once and reused across test functions.
    let sampled: Vec<Vec<WeightedPoint>> = families.iter().map(family_points).collect();
    let suite = test_suite(omega, b);
    let residuals: Vec<PushResidual> = crate::par::map_indexed(suite.len(), |i| {
        let (name, phi) = &suite[i];
        let push: f64 = sampled
            .iter()
            .map(|pts| pts.iter().map(|pt| pt.w * phi(pt.u, pt.v)).sum::<f64>())
            .sum();
        let area = area_integral(metric, phi);
        PushResidual { name: (*name).to_string(), residual: (push - area).abs() / volume }
    });
    let eps_push = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);

    let mass_product: f64 = groups.iter().map(|g| g.mass).product();
    let c = volume.powf(p as f64 / 2.0) / ((p as f64).powi(p as i32) * mass_product);
    let valid = eps_push < tol.tol_push && eps_mass < tol.tol_mass;
    Ok(BoundCertificate {
        inequality,
        beta,
        omega,
        b,
        m_prime,
        volume,
        p,
        groups,
        eps_push,
        eps_mass,
        tol_push: tol.tol_push,
        tol_mass: tol.tol_mass,
        c,
        valid,
        push_residuals: residuals,
    })
}

fn group(class: &str, mass: f64, length: f64) -> MassGroup {
    MassGroup { class: class.to_string(), mass, length, weighted: mass * length }
}

/// Solve the extremal parameters at `beta` and certify the inequality.
pub fn certify_for_beta(
    inequality: Inequality,
    beta: f64,
    tol: ToleranceSpec,
) -> Result<BoundCertificate> {
    let (metric, families) = certificate_setup(inequality, beta)?;
    certify(inequality, &metric, &families, tol)
}

/// Scale-invariant inequality ratio `prod l_i / (C vol^{p/2})` under a
/// certified (or formula-supplied) constant; at most `1` when the bound
/// holds, exactly `1` at the extremal metric. Lives here so the ratio
/// definition has a single home.
pub fn inequality_ratio(lengths: &[f64], volume: f64, c: f64) -> f64 {
    let p = lengths.len() as f64;
    lengths.iter().product::<f64>() / (c * volume.powf(p / 2.0))
}

/// The common weighted mass `M = m_i l_i` of a valid p = 3 certificate;
/// `3 M = vol` at the product-extremal metric.
pub fn common_weighted_mass(cert: &BoundCertificate) -> f64 {
    cert.groups.iter().map(|g| g.weighted).sum::<f64>() / cert.groups.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants;
    use approx::assert_relative_eq;

    #[test]
    fn density_reduces_to_the_pure_cap_form_at_full_vertical_weight() {
        for i in 1..=20 {
            let omega = i as f64 * (PI / 2.0) / 21.0;
            let m_prime = PI * omega.cos();
            for frac in [0.1, 0.5, 0.9, 0.99] {
                let a = frac * omega;
                let unified = h_density(a, omega, m_prime).unwrap();
                let ca2 = a.cos() * a.cos();
                let cw2 = omega.cos() * omega.cos();
                let pure_cap = a.sin() / (PI * a.cos()) * (ca2 - cw2).sqrt();
                assert_relative_eq!(unified, pure_cap, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn density_matches_the_pi_third_special_form() {
        // At omega = pi/3, cos omega / pi = 1/(2 pi): the density reads
        // (sin a/(pi cos a)) (cos^2 a - m'/(2 pi)) / sqrt(cos^2 a - 1/4).
        let omega = PI / 3.0;
        let m_prime = 0.7;
        for a in [0.1, 0.5, 0.9] {
            let unified = h_density(a, omega, m_prime).unwrap();
            let ca2 = a.cos() * a.cos();
            let special =
                a.sin() / (PI * a.cos()) * (ca2 - m_prime / (2.0 * PI)) / (ca2 - 0.25).sqrt();
            assert_relative_eq!(unified, special, max_relative = 1e-13);
        }
    }

    #[test]
    fn density_domain_and_zero() {
        assert_eq!(h_density(0.0, 0.8, 0.3).unwrap(), 0.0);
        assert!(h_density(0.8, 0.8, 0.3).is_err());
        assert!(h_density(0.9, 0.8, 0.3).is_err());
        assert!(h_density(-0.1, 0.8, 0.3).is_err());
        assert!(h_density(0.3, 0.8, 100.0).is_err());
    }

    #[test]
    fn circle_mass_closed_form_matches_singularity_adapted_quadrature() {
        // m1 = 4 pi * integral of h over [0, w] = (2 caps) x (2 latitude
        // signs) x (theta over [0, pi)) x integral of the t-substituted
        // density.
        for (omega, b, m_prime) in [(0.4, 1.0, 0.2), (1.1, 1.3, 1.0), (PI / 3.0, 1.5, 0.9)] {
            let sw = omega.sin();
            let k = m_prime / PI * omega.cos();
            let rho = |t: f64| {
                let s = sw * t.sin();
                s / PI * (1.0 - s * s - k) / (1.0 - s * s)
            };
            let integral = quad::integrate_gl(&rho, 0.0, PI / 2.0, 64);
            let quadrature_mass = 4.0 * PI * integral;
            let (m1, _, _) = family_masses(omega, b, m_prime);
            assert_relative_eq!(quadrature_mass, m1, max_relative = 1e-10);
        }
    }

    #[test]
    fn mass_balances_pin_the_vertical_weight() {
        for (omega, b) in [(0.5f64, 1.1f64), (0.9, 2.0), (1.2, 3.0)] {
            // m' = pi sin w / (b + w) balances circles against verticals.
            let mp = PI * omega.sin() / (b + omega);
            let (m1, m2, _) = family_masses(omega, b, mp);
            assert_relative_eq!(m1 * PI, m2 * 4.0 * b, max_relative = 1e-12);

            // m' = pi cos w (b - w)/(2b - w) balances verticals against
            // band circles.
            let mp = PI * omega.cos() * (b - omega) / (2.0 * b - omega);
            let (_, m2, m3) = family_masses(omega, b, mp);
            assert_relative_eq!(m2 * 4.0 * b, m3 * 2.0 * PI * omega.cos(), max_relative = 1e-12);
        }
    }

    #[test]
    fn pi_third_masses_reproduce_the_corrected_total() {
        // At omega = pi/3 with the solved m', the circle families carry
        // total mass sqrt(3) + b - pi/3 (not the misprinted sqrt(3) + 3b -
        // pi/3, which contradicts the balance condition).
        for b in [1.1, 1.6, 2.5] {
            let m_prime = PI * (3.0f64.sqrt() + b - PI / 3.0) / (4.0 * b);
            let (m1, m2, m3) = family_masses(PI / 3.0, b, m_prime);
            assert_relative_eq!(m1 + m3, 3.0f64.sqrt() + b - PI / 3.0, max_relative = 1e-12);
            // Balance: (m1 + m3) pi = m2 * 4b.
            assert_relative_eq!((m1 + m3) * PI, m2 * 4.0 * b, max_relative = 1e-12);
        }
    }

    #[test]
    fn vertical_pushforward_of_one_is_mass_times_length() {
        let (omega, b, mp) = (0.7, 1.4, 0.5);
        let m = CurveFamilyMeasure::verticals(omega, b, mp).unwrap();
        let push = pushforward_pair(&m, |_, _| 1.0);
        assert_relative_eq!(push, 4.0 * b * mp, max_relative = 1e-12);
    }

    #[test]
    fn horizontal_pushforward_vanishes_off_the_band() {
        let (omega, b, mp) = (0.6, 1.5, 0.4);
        let m = CurveFamilyMeasure::horizontals(omega, b, mp).unwrap();
        // Supported strictly inside |v| < omega: disjoint from the band.
        let push = pushforward_pair(&m, |_, v| if v.abs() < omega { 1.0 } else { 0.0 });
        assert_eq!(push, 0.0);
    }

    #[test]
    fn total_pushforward_of_one_is_the_volume_for_every_weight() {
        // Sum of mass x length = vol independently of m'.
        let (omega, b) = (0.65, 1.2);
        let metric = extremal::band_extremal(omega, b).unwrap();
        for mp in [0.0, 0.3, PI * omega.cos()] {
            let total: f64 = [
                CurveFamilyMeasure::great_circles(omega, b, mp).unwrap(),
                CurveFamilyMeasure::verticals(omega, b, mp).unwrap(),
                CurveFamilyMeasure::horizontals(omega, b, mp).unwrap(),
            ]
            .iter()
            .map(|m| pushforward_pair(m, |_, _| 1.0))
            .sum();
            assert_relative_eq!(total, metric.volume(), max_relative = 1e-9);
        }
    }

    #[test]
    fn certificate_on_the_glide_vertical_extremal() {
        // Regime-2 setup: tan w = b + w, m' = pi cos w; the certified
        // constant must be 1/(2 cos w) and match the constants module.
        let beta = 4.0;
        let cert = certify_for_beta(Inequality::SigmaV, beta, ToleranceSpec::default()).unwrap();
        assert!(cert.valid, "eps_push = {}, eps_mass = {}", cert.eps_push, cert.eps_mass);
        assert!(cert.eps_mass < 1e-10);
        assert!(cert.eps_push < 1e-3);
        assert_relative_eq!(cert.c, 0.5 / cert.omega.cos(), max_relative = 1e-12);
        let reference = constants::c_sigma_v(beta).unwrap();
        assert_relative_eq!(cert.c, reference.c, max_relative = 1e-9);
        assert_eq!(cert.p, 2);
    }

    #[test]
    fn certificate_on_the_min_circle_vertical_extremal() {
        // The certified constant is 2b/(sqrt 3 + b - pi/3); the total
        // pushforward also fixes the volume bookkeeping: vol(H_b) =
        // 2 pi (sqrt 3 + b - pi/3), not twice it.
        let beta = 5.0;
        let cert = certify_for_beta(Inequality::SigmaNV, beta, ToleranceSpec::default()).unwrap();
        assert!(cert.valid, "eps_push = {}, eps_mass = {}", cert.eps_push, cert.eps_mass);
        let b = cert.b;
        assert_relative_eq!(
            cert.c,
            2.0 * b / (3.0f64.sqrt() + b - PI / 3.0),
            max_relative = 1e-12
        );
        let reference = constants::c_sigma_n_v(beta).unwrap();
        assert_relative_eq!(cert.c, reference.c, max_relative = 1e-9);
        assert_relative_eq!(
            cert.volume,
            2.0 * PI * (3.0f64.sqrt() + b - PI / 3.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn certificate_on_the_product_extremal() {
        // p = 3: every group carries the same weighted mass M, and
        // 3 M = vol at the solved parameters.
        let beta = 2.0;
        let cert = certify_for_beta(Inequality::SigmaVH, beta, ToleranceSpec::default()).unwrap();
        assert!(cert.valid, "eps_push = {}, eps_mass = {}", cert.eps_push, cert.eps_mass);
        assert_eq!(cert.p, 3);
        let m = common_weighted_mass(&cert);
        assert_relative_eq!(
            m,
            4.0 * PI * cert.b * cert.omega.sin() / (cert.b + cert.omega),
            max_relative = 1e-10
        );
        assert_relative_eq!(3.0 * m, cert.volume, max_relative = 1e-9);
        let reference = constants::c_sigma_v_h(beta).unwrap();
        assert_relative_eq!(cert.c, reference.c, max_relative = 1e-9);
    }

    #[test]
    fn no_certificates_below_threshold_or_for_moebius() {
        // Spherical regime carries no measure construction.
        assert!(certify_for_beta(Inequality::SigmaV, 1.0, ToleranceSpec::default()).is_err());
        assert!(certify_for_beta(Inequality::MobiusSigmaV, 3.0, ToleranceSpec::default()).is_err());
    }

    #[test]
    fn certificate_serializes_with_stable_names() {
        let cert = certify_for_beta(Inequality::SigmaVH, 1.5, ToleranceSpec::default()).unwrap();
        let json = serde_json::to_value(&cert).unwrap();
        assert_eq!(json["theorem"], "sigma-v-h");
        assert!(json["C"].is_string());
        assert!(json["eps_push"].is_string());
        assert_eq!(json["groups"].as_array().unwrap().len(), 3);
        let back: BoundCertificate = serde_json::from_value(json).unwrap();
        assert_eq!(back.c, cert.c);
    }
}

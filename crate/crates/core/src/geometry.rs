//! The Klein bottle as a plane quotient, and the two metric representations
//! used throughout the crate.
//!
//! The surface is the quotient of the plane by the group generated by the
//! glide reflection `(u, v) -> (u + pi, -v)` and the vertical translation
//! `(u, v) -> (u, v + 2V)`. A fundamental domain is
//! `[-pi/2, pi/2] x [-V, V]`.
//!
//! A [`ProfileMetric`] is a rotationally symmetric metric
//! `f(v)^2 du^2 + dv^2` given by a positive even profile `f`. Its conformal
//! type is `beta = integral of dt/f over [0, V]`, and the substitution
//! `w(v) = integral of dt/f over [0, v]` turns it into the conformally flat
//! form `phi(u, w)^2 (du^2 + dw^2)` on `[-pi/2, pi/2] x [-beta, beta]`,
//! which is what [`GridMetric`] stores on a uniform grid.

use crate::error::{Error, Result};
use crate::quad;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

/// Half-width of the fundamental domain in the `u` direction.
pub const U_HALF_WIDTH: f64 = FRAC_PI_2;

/// Relative tolerance used when checking gluing compatibility of grid data.
pub const GLUING_TOL: f64 = 1e-12;

/// `log(tan(pi/4 + x/2))`, the antiderivative of `1/cos` at `x`; inverse of
/// the Gudermannian function. Valid for `|x| < pi/2`.
///
/// Computed as `asinh(tan x)` (an exact identity), which keeps full relative
/// precision near `0` and stays finite all the way to the representable
/// neighbors of `pi/2`, where `atanh(sin x)` would round to infinity.
pub fn inverse_gudermannian(x: f64) -> f64 {
    x.tan().asinh()
}

/// Inverse of [`inverse_gudermannian`]: `asin(tanh(w))`.
pub fn gudermannian(w: f64) -> f64 {
    w.tanh().asin()
}

/// The quotient structure: deck transformations of the defining group action
/// for a domain of half-height `v_half_height`.
#[derive(Clone, Copy, Debug)]
pub struct FundamentalDomain {
    pub v_half_height: f64,
}

impl FundamentalDomain {
    pub fn new(v_half_height: f64) -> Result<Self> {
        if !(v_half_height > 0.0) || !v_half_height.is_finite() {
            return Err(Error::OutOfRange(format!(
                "v_half_height must be positive and finite, got {v_half_height}"
            )));
        }
        Ok(Self { v_half_height })
    }

    /// Glide reflection `(u, v) -> (u + pi, -v)`.
    pub fn glide(&self, p: (f64, f64)) -> (f64, f64) {
        (p.0 + PI, -p.1)
    }

    /// Vertical translation `(u, v) -> (u, v + 2V)`.
    pub fn vertical(&self, p: (f64, f64)) -> (f64, f64) {
        (p.0, p.1 + 2.0 * self.v_half_height)
    }

    /// Horizontal translation `(u, v) -> (u + 2 pi, v)`, the square of the
    /// glide reflection.
    pub fn horizontal(&self, p: (f64, f64)) -> (f64, f64) {
        (p.0 + 2.0 * PI, p.1)
    }
}

/// Closed-form profile families, plus a tabulated fallback.
///
/// All length scales are angles: caps are pieces of the unit sphere, flats
/// are flat cylinders, and the two glue along circles where the profile is
/// continuous but not differentiable.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind {
    /// `f(v) = c` on `|v| <= V`: a flat metric of width `pi c`.
    Constant { c: f64 },
    /// Two spherical caps of angular radius `b` glued rim to rim:
    /// `f(v) = cos(v)` on `|v| <= b`, `f(v) = cos(2b - |v|)` beyond.
    SphericalCap { b: f64 },
    /// Caps of radius `omega` at `v = 0` and `v = +-2b`, joined by flat
    /// bands `f = cos(omega)` on `omega <= |v| <= 2b - omega`.
    FlatSpherical { omega: f64, b: f64 },
    /// [`ProfileKind::FlatSpherical`] with `omega = pi/3` (flat factor 1/2).
    FlatSphericalPi3 { b: f64 },
    /// Even profile sampled uniformly on `[0, V]` and interpolated linearly.
    Tabulated { samples: Vec<f64> },
}

/// A rotationally symmetric metric `f(v)^2 du^2 + dv^2` on the fundamental
/// domain `[-pi/2, pi/2] x [-V, V]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileMetric {
    kind: ProfileKind,
    v_half_height: f64,
}

impl ProfileMetric {
    /// Flat metric `c^2 du^2 + dv^2` of half-height `v_half_height`.
    pub fn constant(c: f64, v_half_height: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidMetric(format!("constant factor must be positive, got {c}")));
        }
        if !(v_half_height > 0.0) || !v_half_height.is_finite() {
            return Err(Error::InvalidMetric(format!(
                "half-height must be positive, got {v_half_height}"
            )));
        }
        Ok(Self { kind: ProfileKind::Constant { c }, v_half_height })
    }

    /// Double spherical cap of angular radius `b in (0, pi/2)`; half-height `2b`.
    pub fn spherical_cap(b: f64) -> Result<Self> {
        if !(b > 0.0 && b < FRAC_PI_2) {
            return Err(Error::InvalidMetric(format!("cap radius must lie in (0, pi/2), got {b}")));
        }
        Ok(Self { kind: ProfileKind::SphericalCap { b }, v_half_height: 2.0 * b })
    }

    /// Caps of radius `omega` joined by flat bands; requires
    /// `0 < omega <= b` and `omega < pi/2`. Half-height `2b`.
    pub fn flat_spherical(omega: f64, b: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < FRAC_PI_2) {
            return Err(Error::InvalidMetric(format!(
                "cap radius must lie in (0, pi/2), got {omega}"
            )));
        }
        if !(b >= omega) || !b.is_finite() {
            return Err(Error::InvalidMetric(format!(
                "band parameter must satisfy b >= omega, got omega={omega}, b={b}"
            )));
        }
        Ok(Self { kind: ProfileKind::FlatSpherical { omega, b }, v_half_height: 2.0 * b })
    }

    /// Flat-spherical metric with `omega = pi/3`; requires `b >= pi/3`.
    pub fn flat_spherical_pi3(b: f64) -> Result<Self> {
        if !(b >= FRAC_PI_3) || !b.is_finite() {
            return Err(Error::InvalidMetric(format!("requires b >= pi/3, got {b}")));
        }
        Ok(Self { kind: ProfileKind::FlatSphericalPi3 { b }, v_half_height: 2.0 * b })
    }

    /// Even profile from uniform samples on `[0, v_half_height]`.
    pub fn tabulated(samples: Vec<f64>, v_half_height: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidMetric("tabulated profile needs at least 2 samples".into()));
        }
        if samples.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidMetric("tabulated samples must be positive and finite".into()));
        }
        if !(v_half_height > 0.0) || !v_half_height.is_finite() {
            return Err(Error::InvalidMetric(format!(
                "half-height must be positive, got {v_half_height}"
            )));
        }
        Ok(Self { kind: ProfileKind::Tabulated { samples }, v_half_height })
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    pub fn v_half_height(&self) -> f64 {
        self.v_half_height
    }

    pub fn domain(&self) -> FundamentalDomain {
        FundamentalDomain { v_half_height: self.v_half_height }
    }

    /// Reduce any real `v` into `[0, V]` using evenness and `2V`-periodicity.
    fn fold(&self, v: f64) -> f64 {
        let period = 2.0 * self.v_half_height;
        let mut r = v.rem_euclid(period);
        if r > self.v_half_height {
            r = period - r;
        }
        r
    }

    /// Profile value `f(v)`, extended evenly and `2V`-periodically.
    pub fn profile(&self, v: f64) -> f64 {
        let x = self.fold(v);
        match &self.kind {
            ProfileKind::Constant { c } => *c,
            ProfileKind::SphericalCap { b } => {
                if x <= *b {
                    x.cos()
                } else {
                    (2.0 * b - x).cos()
                }
            }
            ProfileKind::FlatSpherical { omega, b } => flat_spherical_profile(*omega, *b, x),
            ProfileKind::FlatSphericalPi3 { b } => flat_spherical_profile(FRAC_PI_3, *b, x),
            ProfileKind::Tabulated { samples } => {
                let n = samples.len();
                let t = x / self.v_half_height * (n - 1) as f64;
                let i = (t.floor() as usize).min(n - 2);
                let frac = t - i as f64;
                samples[i] + frac * (samples[i + 1] - samples[i])
            }
        }
    }

    /// Interior points of `(0, V)` where the profile is continuous but not
    /// differentiable (the gluing circles).
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Constant { .. } => vec![],
            ProfileKind::SphericalCap { b } => vec![*b],
            ProfileKind::FlatSpherical { omega, b } => flat_spherical_kinks(*omega, *b),
            ProfileKind::FlatSphericalPi3 { b } => flat_spherical_kinks(FRAC_PI_3, *b),
            ProfileKind::Tabulated { samples } => {
                let n = samples.len();
                (1..n - 1)
                    .map(|i| self.v_half_height * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
    }

    /// Conformal type `beta = integral of dt/f(t) over [0, V]`, in closed form
    /// (exact for the linear interpolant in the tabulated case).
    pub fn conformal_type(&self) -> f64 {
        match &self.kind {
            ProfileKind::Constant { c } => self.v_half_height / c,
            ProfileKind::SphericalCap { b } => 2.0 * inverse_gudermannian(*b),
            ProfileKind::FlatSpherical { omega, b } => flat_spherical_beta(*omega, *b),
            ProfileKind::FlatSphericalPi3 { b } => flat_spherical_beta(FRAC_PI_3, *b),
            ProfileKind::Tabulated { samples } => {
                let h = self.v_half_height / (samples.len() - 1) as f64;
                samples.windows(2).map(|p| segment_reciprocal_integral(p[0], p[1], h)).sum()
            }
        }
    }

    /// Conformal type by adaptive quadrature of `1/f`, split at the gluing
    /// circles. Cross-checks the closed form.
    pub fn conformal_type_quadrature(&self) -> f64 {
        quad::adaptive_simpson_split(
            &|t| 1.0 / self.profile(t),
            0.0,
            self.v_half_height,
            &self.kinks(),
            1e-12,
        )
    }

    /// Total area `integral of f over the fundamental domain`, closed form.
    pub fn volume(&self) -> f64 {
        match &self.kind {
            ProfileKind::Constant { c } => 2.0 * PI * self.v_half_height * c,
            ProfileKind::SphericalCap { b } => 4.0 * PI * b.sin(),
            ProfileKind::FlatSpherical { omega, b } => flat_spherical_volume(*omega, *b),
            ProfileKind::FlatSphericalPi3 { b } => flat_spherical_volume(FRAC_PI_3, *b),
            ProfileKind::Tabulated { samples } => {
                2.0 * PI * quad::trapezoid_samples(samples, 0.0, self.v_half_height)
            }
        }
    }

    /// Total area by adaptive quadrature of the profile.
    pub fn volume_quadrature(&self) -> f64 {
        2.0 * PI
            * quad::adaptive_simpson_split(
                &|t| self.profile(t),
                0.0,
                self.v_half_height,
                &self.kinks(),
                1e-12,
            )
    }

    /// The flattening coordinate `w(v) = integral of dt/f over [0, v]`,
    /// odd in `v`; closed form per kind.
    pub fn w_of_v(&self, v: f64) -> f64 {
        let x = v.abs().min(self.v_half_height);
        let w = match &self.kind {
            ProfileKind::Constant { c } => x / c,
            ProfileKind::SphericalCap { b } => {
                if x <= *b {
                    inverse_gudermannian(x)
                } else {
                    2.0 * inverse_gudermannian(*b) - inverse_gudermannian(2.0 * b - x)
                }
            }
            ProfileKind::FlatSpherical { omega, b } => flat_spherical_w(*omega, *b, x),
            ProfileKind::FlatSphericalPi3 { b } => flat_spherical_w(FRAC_PI_3, *b, x),
            ProfileKind::Tabulated { samples } => {
                let n = samples.len();
                let h = self.v_half_height / (n - 1) as f64;
                let t = x / h;
                let i = (t.floor() as usize).min(n - 2);
                let partial: f64 = samples[..=i]
                    .windows(2)
                    .map(|p| segment_reciprocal_integral(p[0], p[1], h))
                    .sum();
                partial + segment_reciprocal_partial(samples[i], samples[i + 1], h, x - i as f64 * h)
            }
        };
        if v < 0.0 {
            -w
        } else {
            w
        }
    }

    /// Inverse of [`ProfileMetric::w_of_v`].
    pub fn v_of_w(&self, w: f64) -> f64 {
        let beta = self.conformal_type();
        let x = w.abs().min(beta);
        let v = match &self.kind {
            ProfileKind::Constant { c } => c * x,
            ProfileKind::SphericalCap { b } => {
                let w_rim = inverse_gudermannian(*b);
                if x <= w_rim {
                    gudermannian(x)
                } else {
                    2.0 * b - gudermannian(2.0 * w_rim - x)
                }
            }
            ProfileKind::FlatSpherical { omega, b } => flat_spherical_v(*omega, *b, x),
            ProfileKind::FlatSphericalPi3 { b } => flat_spherical_v(FRAC_PI_3, *b, x),
            ProfileKind::Tabulated { samples } => {
                let n = samples.len();
                let h = self.v_half_height / (n - 1) as f64;
                let mut acc = 0.0;
                let mut i = 0;
                while i < n - 2 {
                    let seg = segment_reciprocal_integral(samples[i], samples[i + 1], h);
                    if acc + seg >= x {
                        break;
                    }
                    acc += seg;
                    i += 1;
                }
                i as f64 * h + segment_reciprocal_invert(samples[i], samples[i + 1], h, x - acc)
            }
        };
        if w < 0.0 {
            -v
        } else {
            v
        }
    }

    /// Resample as a conformally flat grid metric on
    /// `[-pi/2, pi/2] x [-beta, beta]` with `n_u x n_v` nodes.
    ///
    /// The factor rows are exactly mirror-symmetric, so the result always
    /// satisfies the gluing compatibility checked by [`GridMetric::new`].
    pub fn to_conformal_grid(&self, n_u: usize, n_v: usize) -> Result<GridMetric> {
        if n_u < 8 || n_v < 8 {
            return Err(Error::Resolution(format!(
                "conformal resampling needs at least 8x8 nodes, got {n_u}x{n_v}"
            )));
        }
        let beta = self.conformal_type();
        let hv = 2.0 * beta / (n_v - 1) as f64;
        let mut rows = vec![0.0; n_v];
        for j in 0..=(n_v - 1) / 2 {
            let w = beta - j as f64 * hv; // from the top row down to mid-height
            let value = self.profile(self.v_of_w(w));
            rows[n_v - 1 - j] = value;
            rows[j] = value;
        }
        let mut factors = vec![0.0; n_u * n_v];
        for (j, row_value) in rows.iter().enumerate() {
            for i in 0..n_u {
                factors[j * n_u + i] = *row_value;
            }
        }
        GridMetric::new(beta, n_u, n_v, factors)
    }
}

fn flat_spherical_profile(omega: f64, b: f64, x: f64) -> f64 {
    if x <= omega {
        x.cos()
    } else if x <= 2.0 * b - omega {
        omega.cos()
    } else {
        (2.0 * b - x).cos()
    }
}

fn flat_spherical_kinks(omega: f64, b: f64) -> Vec<f64> {
    if (b - omega).abs() < 1e-15 {
        vec![omega]
    } else {
        vec![omega, 2.0 * b - omega]
    }
}

fn flat_spherical_beta(omega: f64, b: f64) -> f64 {
    2.0 * inverse_gudermannian(omega) + 2.0 * (b - omega) / omega.cos()
}

fn flat_spherical_volume(omega: f64, b: f64) -> f64 {
    4.0 * PI * (omega.sin() + (b - omega) * omega.cos())
}

fn flat_spherical_w(omega: f64, b: f64, x: f64) -> f64 {
    let w_cap = inverse_gudermannian(omega);
    if x <= omega {
        inverse_gudermannian(x)
    } else if x <= 2.0 * b - omega {
        w_cap + (x - omega) / omega.cos()
    } else {
        flat_spherical_beta(omega, b) - inverse_gudermannian(2.0 * b - x)
    }
}

fn flat_spherical_v(omega: f64, b: f64, w: f64) -> f64 {
    let w_cap = inverse_gudermannian(omega);
    let beta = flat_spherical_beta(omega, b);
    if w <= w_cap {
        gudermannian(w)
    } else if w <= beta - w_cap {
        omega + (w - w_cap) * omega.cos()
    } else {
        2.0 * b - gudermannian(beta - w)
    }
}

/// Exact `integral of dt / (linear from f0 to f1 over width h)`.
fn segment_reciprocal_integral(f0: f64, f1: f64, h: f64) -> f64 {
    let s = (f1 - f0) / h;
    if s.abs() * h < 1e-14 * f0 {
        h / (0.5 * (f0 + f1))
    } else {
        (f1 / f0).ln() / s
    }
}

/// Same integral truncated to the first `dx <= h` of the segment.
fn segment_reciprocal_partial(f0: f64, f1: f64, h: f64, dx: f64) -> f64 {
    let s = (f1 - f0) / h;
    if s.abs() * h < 1e-14 * f0 {
        dx / f0
    } else {
        ((f0 + s * dx) / f0).ln() / s
    }
}

/// Inverse of [`segment_reciprocal_partial`] in `dx` for a given integral value.
fn segment_reciprocal_invert(f0: f64, f1: f64, h: f64, target: f64) -> f64 {
    let s = (f1 - f0) / h;
    let dx = if s.abs() * h < 1e-14 * f0 {
        target * f0
    } else {
        f0 * ((s * target).exp() - 1.0) / s
    };
    dx.clamp(0.0, h)
}

/// A conformally flat metric `phi(u, w)^2 (du^2 + dw^2)` sampled on a uniform
/// `n_u x n_v` node grid over `[-pi/2, pi/2] x [-beta, beta]`, both boundary
/// lines included.
///
/// Node `(i, j)` sits at `u = -pi/2 + i * pi/(n_u-1)`,
/// `w = -beta + j * 2 beta/(n_v-1)`; `factors[j * n_u + i]` holds `phi` there.
/// Because the domain boundary is glued to itself, the data must satisfy
/// `phi(pi/2, w) = phi(-pi/2, -w)` and `phi(u, beta) = phi(u, -beta)`;
/// construction rejects tables violating either identity at any node.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMetric {
    beta: f64,
    n_u: usize,
    n_v: usize,
    factors: Vec<f64>,
}

impl GridMetric {
    pub fn new(beta: f64, n_u: usize, n_v: usize, factors: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidMetric(format!("beta must be positive, got {beta}")));
        }
        if n_u < 4 || n_v < 4 {
            return Err(Error::Resolution(format!(
                "grid needs at least 4x4 nodes, got {n_u}x{n_v}"
            )));
        }
        if factors.len() != n_u * n_v {
            return Err(Error::InvalidMetric(format!(
                "factor table has {} entries, expected {}",
                factors.len(),
                n_u * n_v
            )));
        }
        if factors.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::InvalidMetric(
                "conformal factors must be positive and finite".into(),
            ));
        }
        let close = |a: f64, b: f64| (a - b).abs() <= GLUING_TOL * a.abs().max(b.abs()).max(1.0);
        for j in 0..n_v {
            let right = factors[j * n_u + (n_u - 1)];
            let left = factors[(n_v - 1 - j) * n_u];
            if !close(right, left) {
                return Err(Error::InvalidMetric(format!(
                    "glide gluing violated at row {j}: phi(pi/2, w_{j}) = {right} vs \
                     phi(-pi/2, -w_{j}) = {left}"
                )));
            }
        }
        for i in 0..n_u {
            let top = factors[(n_v - 1) * n_u + i];
            let bottom = factors[i];
            if !close(top, bottom) {
                return Err(Error::InvalidMetric(format!(
                    "vertical gluing violated at column {i}: {top} vs {bottom}"
                )));
            }
        }
        Ok(Self { beta, n_u, n_v, factors })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n_u(&self) -> usize {
        self.n_u
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    pub fn factor_at(&self, i: usize, j: usize) -> f64 {
        self.factors[j * self.n_u + i]
    }

    /// Grid spacings `(h_u, h_w)`.
    pub fn spacing(&self) -> (f64, f64) {
        (PI / (self.n_u - 1) as f64, 2.0 * self.beta / (self.n_v - 1) as f64)
    }

    /// Conformal factor at an arbitrary node of the plane lift, indices taken
    /// relative to the stored grid. Reduction uses the group action: indices
    /// advance by `n_u - 1` per `u`-half-turn and by `n_v - 1` per vertical
    /// period.
    pub fn lift(&self, i: i64, j: i64) -> f64 {
        let pu = (self.n_u - 1) as i64;
        let pv = (self.n_v - 1) as i64;
        let iu = i.rem_euclid(2 * pu);
        let (iu, j) = if iu <= pu { (iu, j) } else { (iu - pu, -j) };
        let jv = j.rem_euclid(pv);
        self.factors[(jv as usize) * self.n_u + iu as usize]
    }

    /// Total area: tensor trapezoid sum of `phi^2` over the fundamental
    /// domain.
    pub fn volume(&self) -> f64 {
        let (hu, hv) = self.spacing();
        let mut acc = 0.0;
        for j in 0..self.n_v {
            let wj = if j == 0 || j == self.n_v - 1 { 0.5 } else { 1.0 };
            let row = &self.factors[j * self.n_u..(j + 1) * self.n_u];
            let mut row_acc = 0.5 * (row[0] * row[0] + row[self.n_u - 1] * row[self.n_u - 1]);
            for p in &row[1..self.n_u - 1] {
                row_acc += p * p;
            }
            acc += wj * row_acc;
        }
        acc * hu * hv
    }

    /// Multiply every factor by `c > 0` (the metric scales by `c^2`).
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::OutOfRange(format!("scale factor must be positive, got {c}")));
        }
        let factors = self.factors.iter().map(|p| c * p).collect();
        Self::new(self.beta, self.n_u, self.n_v, factors)
    }

    /// Roughly half-resolution subsample (exact stride two when the node
    /// counts are odd), used for discretization error estimates. The index
    /// maps are mirror-symmetric so gluing compatibility is preserved.
    pub fn subsample_half(&self) -> Result<Self> {
        let m_u = (self.n_u + 1) / 2;
        let m_v = (self.n_v + 1) / 2;
        let map_u = symmetric_index_map(self.n_u, m_u);
        let map_v = symmetric_index_map(self.n_v, m_v);
        let mut factors = Vec::with_capacity(m_u * m_v);
        for j in &map_v {
            for i in &map_u {
                factors.push(self.factors[j * self.n_u + i]);
            }
        }
        Self::new(self.beta, m_u, m_v, factors)
    }
}

/// Monotone map of `m` indices into `n` original indices, hitting both ends
/// and symmetric under reversal.
fn symmetric_index_map(n: usize, m: usize) -> Vec<usize> {
    let mut map = vec![0usize; m];
    for k in 0..m / 2 {
        let idx = (k * (n - 1) + (m - 1) / 2) / (m - 1);
        map[k] = idx;
        map[m - 1 - k] = n - 1 - idx;
    }
    if m % 2 == 1 {
        map[m / 2] = (n - 1) / 2;
    }
    map
}

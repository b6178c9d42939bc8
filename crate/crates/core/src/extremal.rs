//! The five optimal-inequality families, their regimes, and constructors for
//! the candidate-extremal metrics attached to a conformal class.
//!
//! Three families live on the Klein bottle:
//! * glide x vertical (`l_sigma * l_v <= C vol`),
//! * subgroup x vertical (`L_sigma * l_v <= C vol`, `L_sigma = min(l_sigma, l_h)`),
//! * glide x vertical x horizontal (`l_sigma * l_v * l_h <= C vol^{3/2}`).
//!
//! Two live on the Moebius band and reduce to the Klein families on the
//! orientation double cover, which doubles the conformal type.

use crate::constants;
use crate::error::{Error, Result};
use crate::geometry::ProfileMetric;
use crate::io::f64_str;
use crate::solvers;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_3;
use std::fmt;

/// An inequality family: which product of class lengths is bounded by which
/// power of the volume.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inequality {
    /// Klein bottle: `l_sigma * l_v <= C vol`.
    SigmaV,
    /// Klein bottle: `min(l_sigma, l_h) * l_v <= C vol`.
    SigmaNV,
    /// Klein bottle: `l_sigma * l_v * l_h <= C vol^{3/2}`.
    SigmaVH,
    /// Moebius band: `l_sigma * l_v <= C vol` (double cover of [`Inequality::SigmaV`]).
    MobiusSigmaV,
    /// Moebius band: `sys * l_v <= C vol` (double cover of [`Inequality::SigmaNV`]).
    MobiusSysV,
}

impl Inequality {
    pub const ALL: [Inequality; 5] = [
        Inequality::SigmaV,
        Inequality::SigmaNV,
        Inequality::SigmaVH,
        Inequality::MobiusSigmaV,
        Inequality::MobiusSysV,
    ];

    /// Kebab-case identifier used by the CLI and the interchange files.
    pub fn slug(self) -> &'static str {
        match self {
            Inequality::SigmaV => "sigma-v",
            Inequality::SigmaNV => "sigma-n-v",
            Inequality::SigmaVH => "sigma-v-h",
            Inequality::MobiusSigmaV => "mobius-sigma-v",
            Inequality::MobiusSysV => "mobius-sys-v",
        }
    }

    pub fn from_slug(s: &str) -> Result<Self> {
        Inequality::ALL
            .into_iter()
            .find(|t| t.slug() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown inequality family {s:?}")))
    }

    /// Number of class lengths multiplied on the left-hand side; the volume
    /// on the right-hand side carries the power `degree/2`.
    pub fn degree(self) -> u32 {
        match self {
            Inequality::SigmaVH => 3,
            _ => 2,
        }
    }

    pub fn is_mobius(self) -> bool {
        matches!(self, Inequality::MobiusSigmaV | Inequality::MobiusSysV)
    }

    /// The Klein-bottle family this reduces to on the orientation double
    /// cover (identity for Klein families).
    pub fn klein_family(self) -> Inequality {
        match self {
            Inequality::MobiusSigmaV => Inequality::SigmaV,
            Inequality::MobiusSysV => Inequality::SigmaNV,
            other => other,
        }
    }

    /// Conformal type of the Klein-bottle model: doubled for Moebius
    /// families, unchanged otherwise.
    pub fn klein_beta(self, beta: f64) -> f64 {
        if self.is_mobius() {
            2.0 * beta
        } else {
            beta
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Which side of the regime threshold a conformal class falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Below threshold: the extremal metric is a pure double spherical cap.
    Spherical,
    /// Above threshold: caps joined by a flat cylinder band.
    FlatSpherical,
}

impl Regime {
    pub fn slug(self) -> &'static str {
        match self {
            Regime::Spherical => "spherical",
            Regime::FlatSpherical => "flat-spherical",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Full description of an extremal metric choice: family, regime, conformal
/// type, and the resolved profile parameters. Serializes as the sidecar
/// document `{"theorem":…,"regime":…,"beta":…,"omega":…,"b":…}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExtremalSpec {
    #[serde(rename = "theorem")]
    pub inequality: Inequality,
    pub regime: Regime,
    #[serde(with = "f64_str")]
    pub beta: f64,
    #[serde(with = "f64_str::optional")]
    pub omega: Option<f64>,
    #[serde(with = "f64_str")]
    pub b: f64,
}

/// Pure double spherical cap of angular radius `b`: the below-threshold
/// extremal for the two-length families.
pub fn cap_extremal(b: f64) -> Result<ProfileMetric> {
    ProfileMetric::spherical_cap(b)
}

/// Spherical caps of radius `omega` joined by a flat band up to half-height
/// `2b`: the general above-threshold profile.
pub fn band_extremal(omega: f64, b: f64) -> Result<ProfileMetric> {
    ProfileMetric::flat_spherical(omega, b)
}

/// Band extremal with cap angle `pi/3` (flat factor `1/2`): the
/// above-threshold extremal of the subgroup x vertical family.
pub fn vertical_band_extremal(b: f64) -> Result<ProfileMetric> {
    ProfileMetric::flat_spherical_pi3(b)
}

/// Band extremal of the three-length family: cap angle `omega`, band
/// parameter `b = q(omega) = tan(omega) + sqrt(tan^2 - omega tan + omega^2)`.
pub fn product_band_extremal(omega: f64) -> Result<ProfileMetric> {
    ProfileMetric::flat_spherical(omega, solvers::sigma_v_h_b_of_omega(omega))
}

/// Resolve the extremal metric of a family at conformal type `beta`:
/// dispatches on the regime threshold, solves the family's root equation,
/// and returns the resolved parameters together with the profile metric.
///
/// For the Moebius families the returned profile is the orientation double
/// cover (a Klein bottle), whose conformal type is `2 beta`.
pub fn extremal_for_beta(
    inequality: Inequality,
    beta: f64,
) -> Result<(ExtremalSpec, ProfileMetric)> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::OutOfRange(format!("conformal type must be positive, got {beta}")));
    }
    let kb = inequality.klein_beta(beta);
    let spherical = match constants::threshold(inequality.klein_family()) {
        Some(t) => kb <= t,
        None => false,
    };
    let (regime, omega, b, metric) = if spherical {
        let b = solvers::cap_b_from_beta(kb)?;
        (Regime::Spherical, None, b, cap_extremal(b)?)
    } else {
        match inequality.klein_family() {
            Inequality::SigmaV => {
                let omega = solvers::omega_from_beta_sigma_v(kb)?.root;
                let b = solvers::sigma_v_b_of_omega(omega);
                (Regime::FlatSpherical, Some(omega), b, band_extremal(omega, b)?)
            }
            Inequality::SigmaNV => {
                let b = solvers::b_from_beta_sigma_n_v(kb)?;
                (Regime::FlatSpherical, Some(FRAC_PI_3), b, vertical_band_extremal(b)?)
            }
            Inequality::SigmaVH => {
                let omega = solvers::omega_from_beta_sigma_v_h(kb)?.root;
                let b = solvers::sigma_v_h_b_of_omega(omega);
                (Regime::FlatSpherical, Some(omega), b, band_extremal(omega, b)?)
            }
            _ => unreachable!("klein_family returns Klein families only"),
        }
    };
    let spec = ExtremalSpec { inequality, regime, beta, omega, b };
    Ok((spec, metric))
}

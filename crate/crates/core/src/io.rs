//! Metric interchange: JSON documents describing either a profile metric or
//! a conformal grid metric.
//!
//! Layout: `{"type":"profile","kind":"flat-spherical","omega":…,"b":…}` or
//! `{"type":"grid","beta":…,"n_u":…,"n_v":…,"factors":[…]}` with `factors`
//! row-major. Every real is written as a decimal string that round-trips
//! bit-exactly (shortest representation, as produced by Rust's `{:?}`);
//! readers also accept plain JSON numbers for hand-written files.

use crate::error::{Error, Result};
use crate::geometry::{GridMetric, ProfileKind, ProfileMetric};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Serde adapters encoding `f64` as bit-exact decimal strings.
pub mod f64_str {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum NumOrStr {
        Num(f64),
        Str(String),
    }

    fn parse(raw: NumOrStr) -> Result<f64, String> {
        match raw {
            NumOrStr::Num(x) => Ok(x),
            NumOrStr::Str(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("invalid real literal {s:?}: {e}")),
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{x:?}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        parse(NumOrStr::deserialize(d)?).map_err(D::Error::custom)
    }

    pub mod optional {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_some(&format!("{v:?}")),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            let raw: Option<NumOrStr> = Option::deserialize(d)?;
            raw.map(|r| parse(r).map_err(D::Error::custom)).transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&format!("{x:?}"))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            let raw: Vec<NumOrStr> = Vec::deserialize(d)?;
            raw.into_iter().map(|r| parse(r).map_err(D::Error::custom)).collect()
        }
    }
}

/// On-disk form of a profile metric.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileRecord {
    Constant {
        #[serde(with = "f64_str")]
        c: f64,
        #[serde(with = "f64_str")]
        v_half_height: f64,
    },
    SphericalCap {
        #[serde(with = "f64_str")]
        b: f64,
    },
    FlatSpherical {
        #[serde(with = "f64_str")]
        omega: f64,
        #[serde(with = "f64_str")]
        b: f64,
    },
    FlatSphericalPi3 {
        #[serde(with = "f64_str")]
        b: f64,
    },
    Tabulated {
        #[serde(with = "f64_str::vec")]
        samples: Vec<f64>,
        #[serde(with = "f64_str")]
        v_half_height: f64,
    },
}

/// On-disk form of a conformal grid metric.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridRecord {
    #[serde(with = "f64_str")]
    pub beta: f64,
    pub n_u: usize,
    pub n_v: usize,
    #[serde(with = "f64_str::vec")]
    pub factors: Vec<f64>,
}

/// A metric interchange document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MetricRecord {
    Profile(ProfileRecord),
    Grid(GridRecord),
}

/// A loaded metric: either representation, ready for use.
#[derive(Clone, Debug)]
pub enum Metric {
    Profile(ProfileMetric),
    Grid(GridMetric),
}

impl Metric {
    /// The conformal type, whichever representation is held.
    pub fn conformal_type(&self) -> f64 {
        match self {
            Metric::Profile(p) => p.conformal_type(),
            Metric::Grid(g) => g.beta(),
        }
    }

    /// A grid of the requested resolution: profiles are resampled, stored
    /// grids are returned as-is (their resolution is already fixed).
    pub fn to_grid(&self, n_u: usize, n_v: usize) -> Result<GridMetric> {
        match self {
            Metric::Profile(p) => p.to_conformal_grid(n_u, n_v),
            Metric::Grid(g) => Ok(g.clone()),
        }
    }
}

impl From<&ProfileMetric> for MetricRecord {
    fn from(m: &ProfileMetric) -> Self {
        let record = match m.kind() {
            ProfileKind::Constant { c } => {
                ProfileRecord::Constant { c: *c, v_half_height: m.v_half_height() }
            }
            ProfileKind::SphericalCap { b } => ProfileRecord::SphericalCap { b: *b },
            ProfileKind::FlatSpherical { omega, b } => {
                ProfileRecord::FlatSpherical { omega: *omega, b: *b }
            }
            ProfileKind::FlatSphericalPi3 { b } => ProfileRecord::FlatSphericalPi3 { b: *b },
            ProfileKind::Tabulated { samples } => ProfileRecord::Tabulated {
                samples: samples.clone(),
                v_half_height: m.v_half_height(),
            },
        };
        MetricRecord::Profile(record)
    }
}

impl From<&GridMetric> for MetricRecord {
    fn from(g: &GridMetric) -> Self {
        MetricRecord::Grid(GridRecord {
            beta: g.beta(),
            n_u: g.n_u(),
            n_v: g.n_v(),
            factors: g.factors().to_vec(),
        })
    }
}

impl MetricRecord {
    /// Validate and convert into a usable metric.
    pub fn into_metric(self) -> Result<Metric> {
        match self {
            MetricRecord::Profile(p) => Ok(Metric::Profile(match p {
                ProfileRecord::Constant { c, v_half_height } => {
                    ProfileMetric::constant(c, v_half_height)?
                }
                ProfileRecord::SphericalCap { b } => ProfileMetric::spherical_cap(b)?,
                ProfileRecord::FlatSpherical { omega, b } => {
                    ProfileMetric::flat_spherical(omega, b)?
                }
                ProfileRecord::FlatSphericalPi3 { b } => ProfileMetric::flat_spherical_pi3(b)?,
                ProfileRecord::Tabulated { samples, v_half_height } => {
                    ProfileMetric::tabulated(samples, v_half_height)?
                }
            })),
            MetricRecord::Grid(g) => {
                Ok(Metric::Grid(GridMetric::new(g.beta, g.n_u, g.n_v, g.factors)?))
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Read a metric interchange file.
pub fn read_metric(path: &Path) -> Result<Metric> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    MetricRecord::from_json(&text)?.into_metric()
}

/// Write a metric interchange file.
pub fn write_metric(path: &Path, record: &MetricRecord) -> Result<()> {
    std::fs::write(path, record.to_json()? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(x: f64) -> u64 {
        x.to_bits()
    }

    #[test]
    fn profile_records_round_trip_bit_exactly() {
        let awkward = [
            std::f64::consts::PI,
            1.0 + f64::EPSILON,
            0.1 + 0.2,
            1e-300,
            6.02e23,
            f64::MIN_POSITIVE,
        ];
        for &x in &awkward {
            let m = ProfileMetric::constant(x, 1.0).unwrap();
            let json = MetricRecord::from(&m).to_json().unwrap();
            let back = MetricRecord::from_json(&json).unwrap().into_metric().unwrap();
            match back {
                Metric::Profile(p) => match p.kind() {
                    ProfileKind::Constant { c } => assert_eq!(bits(*c), bits(x), "{json}"),
                    _ => panic!("wrong kind"),
                },
                _ => panic!("wrong type"),
            }
        }
    }

    #[test]
    fn grid_records_round_trip_bit_exactly() {
        let m = ProfileMetric::spherical_cap(0.7).unwrap();
        let g = m.to_conformal_grid(9, 11).unwrap();
        let json = MetricRecord::from(&g).to_json().unwrap();
        let back = match MetricRecord::from_json(&json).unwrap().into_metric().unwrap() {
            Metric::Grid(g) => g,
            _ => panic!("wrong type"),
        };
        assert_eq!(bits(back.beta()), bits(g.beta()));
        assert_eq!(back.n_u(), g.n_u());
        for (a, b) in back.factors().iter().zip(g.factors()) {
            assert_eq!(bits(*a), bits(*b));
        }
    }

    #[test]
    fn reals_are_written_as_strings() {
        let m = ProfileMetric::flat_spherical(0.5, 1.25).unwrap();
        let json = MetricRecord::from(&m).to_json().unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["type"], "profile");
        assert_eq!(value["kind"], "flat-spherical");
        assert!(value["omega"].is_string(), "{json}");
        assert_eq!(value["omega"].as_str().unwrap(), "0.5");
        assert_eq!(value["b"].as_str().unwrap(), "1.25");
    }

    #[test]
    fn numbers_are_accepted_on_input() {
        let json = r#"{"type":"profile","kind":"spherical-cap","b":0.9}"#;
        let m = MetricRecord::from_json(json).unwrap().into_metric().unwrap();
        match m {
            Metric::Profile(p) => assert_eq!(p.v_half_height(), 1.8),
            _ => panic!("wrong type"),
        }
    }

    #[test]
    fn invalid_documents_are_rejected() {
        // Unknown kind.
        assert!(MetricRecord::from_json(r#"{"type":"profile","kind":"torus","b":"1"}"#).is_err());
        // Unparsable real.
        assert!(MetricRecord::from_json(
            r#"{"type":"profile","kind":"spherical-cap","b":"widest"}"#
        )
        .is_err());
        // Structurally valid but geometrically invalid: rejected on conversion.
        let rec =
            MetricRecord::from_json(r#"{"type":"profile","kind":"spherical-cap","b":"2.0"}"#)
                .unwrap();
        assert!(rec.into_metric().is_err());
        // Grid with wrong factor count.
        let rec = MetricRecord::from_json(
            r#"{"type":"grid","beta":"1.0","n_u":4,"n_v":4,"factors":["1","1","1"]}"#,
        )
        .unwrap();
        assert!(rec.into_metric().is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("metric.json");
        let m = ProfileMetric::flat_spherical_pi3(1.5).unwrap();
        write_metric(&path, &MetricRecord::from(&m)).unwrap();
        let back = read_metric(&path).unwrap();
        assert_eq!(back.conformal_type().to_bits(), m.conformal_type().to_bits());
    }
}

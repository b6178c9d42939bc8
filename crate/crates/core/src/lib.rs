//! Optimal conformal systolic inequalities and extremal metrics on the
//! Klein bottle.
//!
//! The crate computes, for rotationally symmetric Klein bottles of a given
//! conformal type, the optimal ratios between three systolic invariants and
//! the total area — together with the extremal metrics realizing them, the
//! curve-measure certificates proving them, and numerical machinery (grid
//! systole search, randomized sweeps) for validating the inequalities on
//! perturbed metrics.

pub mod constants;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod io;
pub mod measure;
pub(crate) mod par;
pub mod quad;
pub mod solvers;
pub mod systole;
pub mod verification;

pub use constants::ConstantResult;
pub use error::{Error, Result};
pub use extremal::{ExtremalSpec, Inequality, Regime};
pub use geometry::{FundamentalDomain, GridMetric, ProfileKind, ProfileMetric};
pub use io::{Metric, MetricRecord};
pub use measure::{BoundCertificate, CurveFamilyMeasure, FamilyKind, ToleranceSpec};
pub use systole::{HomotopyClass, SystoleReport};
pub use verification::{AsymptoticsReport, PerturbationSpec, SweepResult};

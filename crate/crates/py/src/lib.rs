//! Python bindings for the `klein-systolic` crate.
//!
//! The module mirrors the library surface: metric constructors, optimal
//! systolic constants, the defining transcendental equations, extremal
//! metrics, systole reports, measure certificates, randomized inequality
//! sweeps, and the asymptotics probe. Reports are returned as plain
//! dictionaries whose keys match the JSON wire format used by the CLI and
//! the metric interchange files, with numbers as native floats.

use pyo3::exceptions::{PyIOError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};
use std::path::PathBuf;

use klein_systolic as ks;
use klein_systolic::{constants, measure, solvers, systole, verification};

fn to_py_err(e: ks::Error) -> PyErr {
    match e {
        ks::Error::Io(_) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_theorem(s: &str) -> PyResult<ks::Inequality> {
    ks::Inequality::from_slug(s).map_err(to_py_err)
}

fn parse_classes(names: Vec<String>) -> PyResult<Vec<ks::HomotopyClass>> {
    names
        .iter()
        .map(|s| ks::HomotopyClass::from_slug(s).map_err(to_py_err))
        .collect()
}

// ---------------------------------------------------------------------------
// Report -> dict conversions (keys follow the JSON wire format).
// ---------------------------------------------------------------------------

fn constant_dict<'py>(py: Python<'py>, r: &ks::ConstantResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("theorem", r.inequality.slug())?;
    d.set_item("beta", r.beta)?;
    d.set_item("regime", r.regime.slug())?;
    d.set_item("C", r.c)?;
    d.set_item("omega", r.omega)?;
    d.set_item("b", r.b)?;
    d.set_item("x", r.x)?;
    Ok(d)
}

fn extremal_spec_dict<'py>(py: Python<'py>, s: &ks::ExtremalSpec) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("theorem", s.inequality.slug())?;
    d.set_item("regime", s.regime.slug())?;
    d.set_item("beta", s.beta)?;
    d.set_item("omega", s.omega)?;
    d.set_item("b", s.b)?;
    Ok(d)
}

fn root_dict<'py>(
    py: Python<'py>,
    equation: &str,
    beta: Option<f64>,
    r: &solvers::RootSolve,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("equation", equation)?;
    d.set_item("beta", beta)?;
    d.set_item("root", r.root)?;
    d.set_item("residual", r.residual)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("bracket", r.bracket)?;
    Ok(d)
}

fn systole_dict<'py>(py: Python<'py>, r: &ks::SystoleReport) -> PyResult<Bound<'py, PyDict>> {
    let err = PyDict::new(py);
    err.set_item("l_sigma", r.error_estimate.l_sigma)?;
    err.set_item("l_v", r.error_estimate.l_v)?;
    err.set_item("l_h", r.error_estimate.l_h)?;
    let d = PyDict::new(py);
    d.set_item("l_sigma", r.l_sigma)?;
    d.set_item("l_v", r.l_v)?;
    d.set_item("l_h", r.l_h)?;
    d.set_item("L_sigma", r.big_l_sigma)?;
    d.set_item("volume", r.volume)?;
    d.set_item("n_u", r.n_u)?;
    d.set_item("n_v", r.n_v)?;
    d.set_item("error_estimate", err)?;
    Ok(d)
}

fn certificate_dict<'py>(py: Python<'py>, c: &ks::BoundCertificate) -> PyResult<Bound<'py, PyDict>> {
    let groups: Vec<Bound<'py, PyDict>> = c
        .groups
        .iter()
        .map(|g| {
            let d = PyDict::new(py);
            d.set_item("class", &g.class)?;
            d.set_item("mass", g.mass)?;
            d.set_item("length", g.length)?;
            d.set_item("weighted", g.weighted)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    let residuals: Vec<Bound<'py, PyDict>> = c
        .push_residuals
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", &r.name)?;
            d.set_item("residual", r.residual)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    let d = PyDict::new(py);
    d.set_item("theorem", c.inequality.slug())?;
    d.set_item("beta", c.beta)?;
    d.set_item("omega", c.omega)?;
    d.set_item("b", c.b)?;
    d.set_item("m_prime", c.m_prime)?;
    d.set_item("volume", c.volume)?;
    d.set_item("p", c.p)?;
    d.set_item("groups", groups)?;
    d.set_item("eps_push", c.eps_push)?;
    d.set_item("eps_mass", c.eps_mass)?;
    d.set_item("tol_push", c.tol_push)?;
    d.set_item("tol_mass", c.tol_mass)?;
    d.set_item("C", c.c)?;
    d.set_item("valid", c.valid)?;
    d.set_item("push_residuals", residuals)?;
    Ok(d)
}

fn sweep_dict<'py>(py: Python<'py>, r: &ks::SweepResult) -> PyResult<Bound<'py, PyDict>> {
    let outcomes: Vec<Bound<'py, PyDict>> = r
        .outcomes
        .iter()
        .map(|o| {
            let d = PyDict::new(py);
            d.set_item("seed", o.seed)?;
            d.set_item("ratio", o.ratio)?;
            d.set_item("refined_ratio", o.refined_ratio)?;
            d.set_item("violation", o.violation)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    let d = PyDict::new(py);
    d.set_item("theorem", r.inequality.slug())?;
    d.set_item("beta", r.beta)?;
    d.set_item("samples", r.samples)?;
    d.set_item("amplitude", r.amplitude)?;
    d.set_item("modes_u", r.modes_u)?;
    d.set_item("modes_v", r.modes_v)?;
    d.set_item("n_u", r.n_u)?;
    d.set_item("n_v", r.n_v)?;
    d.set_item("base_seed", r.base_seed)?;
    d.set_item("C", r.c)?;
    d.set_item("tol_grid", r.tol_grid)?;
    d.set_item("worst_ratio", r.worst_ratio)?;
    d.set_item("worst_seed", r.worst_seed)?;
    d.set_item("equality_gap", r.equality_gap)?;
    d.set_item("violations", r.violations)?;
    d.set_item("failing_seed", r.failing_seed)?;
    d.set_item("pass", r.pass)?;
    d.set_item("outcomes", outcomes)?;
    Ok(d)
}

fn probe_point_dict<'py>(
    py: Python<'py>,
    p: &verification::ProbePoint,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("beta", p.beta)?;
    d.set_item("C", p.c)?;
    Ok(d)
}

fn asymptotics_dict<'py>(py: Python<'py>, r: &ks::AsymptoticsReport) -> PyResult<Bound<'py, PyDict>> {
    let grid: Vec<Bound<'py, PyDict>> = r
        .sigma_n_v_limit
        .grid
        .iter()
        .map(|p| probe_point_dict(py, p))
        .collect::<PyResult<_>>()?;
    let limit = PyDict::new(py);
    limit.set_item("grid", grid)?;
    limit.set_item("monotone_increasing", r.sigma_n_v_limit.monotone_increasing)?;
    limit.set_item("limit_gap", r.sigma_n_v_limit.limit_gap)?;
    let slope = PyDict::new(py);
    slope.set_item("omegas", r.product_slope.omegas.clone())?;
    slope.set_item("derivatives", r.product_slope.derivatives.clone())?;
    slope.set_item("derivatives_refined", r.product_slope.derivatives_refined.clone())?;
    slope.set_item("sign", r.product_slope.sign)?;
    slope.set_item("stable_under_refinement", r.product_slope.stable_under_refinement)?;
    let d = PyDict::new(py);
    d.set_item("sigma_v_unbounded", probe_point_dict(py, &r.sigma_v_unbounded)?)?;
    d.set_item("sigma_n_v_limit", limit)?;
    d.set_item("sigma_v_h_unbounded", probe_point_dict(py, &r.sigma_v_h_unbounded)?)?;
    d.set_item("product_slope", slope)?;
    d.set_item("pass", r.pass)?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// Metric classes.
// ---------------------------------------------------------------------------

/// Rotationally symmetric metric `f(v)^2 du^2 + dv^2` on the Klein bottle's
/// fundamental domain `[-pi/2, pi/2] x [-V, V]`.
#[pyclass(frozen, skip_from_py_object, module = "klein_systolic_py")]
#[derive(Clone)]
pub struct ProfileMetric {
    inner: ks::ProfileMetric,
}

/// Conformal factor sampled on the uniform `(u, w)` grid of the conformal
/// model `[-pi/2, pi/2] x [-beta, beta]`, deck-compatible at the seams.
#[pyclass(frozen, skip_from_py_object, module = "klein_systolic_py")]
#[derive(Clone)]
pub struct GridMetric {
    inner: ks::GridMetric,
}

#[pymethods]
impl ProfileMetric {
    /// Round metric of two spherical caps of angular radius `b`.
    #[staticmethod]
    fn spherical_cap(b: f64) -> PyResult<Self> {
        Ok(Self { inner: ks::ProfileMetric::spherical_cap(b).map_err(to_py_err)? })
    }

    /// Caps of radius `omega` joined by flat bands, total half-height `2b`.
    #[staticmethod]
    fn flat_spherical(omega: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: ks::ProfileMetric::flat_spherical(omega, b).map_err(to_py_err)? })
    }

    /// The `omega = pi/3` member of the flat-spherical family.
    #[staticmethod]
    fn flat_spherical_pi3(b: f64) -> PyResult<Self> {
        Ok(Self { inner: ks::ProfileMetric::flat_spherical_pi3(b).map_err(to_py_err)? })
    }

    /// Flat metric `c^2 du^2 + dv^2` on `|v| <= v_half_height`.
    #[staticmethod]
    fn constant(c: f64, v_half_height: f64) -> PyResult<Self> {
        Ok(Self { inner: ks::ProfileMetric::constant(c, v_half_height).map_err(to_py_err)? })
    }

    /// Even profile sampled uniformly on `[0, v_half_height]`.
    #[staticmethod]
    fn tabulated(samples: Vec<f64>, v_half_height: f64) -> PyResult<Self> {
        Ok(Self { inner: ks::ProfileMetric::tabulated(samples, v_half_height).map_err(to_py_err)? })
    }

    /// Profile family name: `constant`, `spherical-cap`, `flat-spherical`,
    /// or `tabulated`.
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            ks::ProfileKind::Constant { .. } => "constant",
            ks::ProfileKind::SphericalCap { .. } => "spherical-cap",
            ks::ProfileKind::FlatSpherical { .. } | ks::ProfileKind::FlatSphericalPi3 { .. } => {
                "flat-spherical"
            }
            ks::ProfileKind::Tabulated { .. } => "tabulated",
        }
    }

    /// Defining parameters of the profile family.
    #[getter]
    fn params<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        match self.inner.kind() {
            ks::ProfileKind::Constant { c } => d.set_item("c", c)?,
            ks::ProfileKind::SphericalCap { b } => d.set_item("b", b)?,
            ks::ProfileKind::FlatSpherical { omega, b } => {
                d.set_item("omega", omega)?;
                d.set_item("b", b)?;
            }
            ks::ProfileKind::FlatSphericalPi3 { b } => {
                d.set_item("omega", std::f64::consts::FRAC_PI_3)?;
                d.set_item("b", b)?;
            }
            ks::ProfileKind::Tabulated { samples } => d.set_item("samples", samples.clone())?,
        }
        Ok(d)
    }

    /// Conformal type `beta` (half-height of the conformal model).
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.conformal_type()
    }

    /// Total area of the metric.
    #[getter]
    fn volume(&self) -> f64 {
        self.inner.volume()
    }

    /// Half-height `V` of the fundamental domain.
    #[getter]
    fn v_half_height(&self) -> f64 {
        self.inner.v_half_height()
    }

    /// Profile value `f(v)`.
    fn profile(&self, v: f64) -> f64 {
        self.inner.profile(v)
    }

    /// Conformal coordinate `w(v)`.
    fn w_of_v(&self, v: f64) -> f64 {
        self.inner.w_of_v(v)
    }

    /// Inverse of `w_of_v`.
    fn v_of_w(&self, w: f64) -> f64 {
        self.inner.v_of_w(w)
    }

    /// Interior profile kinks on `(0, V)` (the profile is even in `v`).
    fn kinks(&self) -> Vec<f64> {
        self.inner.kinks()
    }

    /// Sample the conformal factor on an `n_u x n_v` grid.
    fn to_grid(&self, py: Python<'_>, n_u: usize, n_v: usize) -> PyResult<GridMetric> {
        let inner = self.inner.clone();
        let grid = py.detach(move || inner.to_conformal_grid(n_u, n_v)).map_err(to_py_err)?;
        Ok(GridMetric { inner: grid })
    }

    /// Metric interchange JSON.
    fn to_json(&self) -> PyResult<String> {
        ks::MetricRecord::from(&self.inner).to_json().map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "ProfileMetric(kind={:?}, beta={:.6}, volume={:.6})",
            self.kind(),
            self.beta(),
            self.volume()
        )
    }
}

#[pymethods]
impl GridMetric {
    /// Wrap a row-major `n_v x n_u` table of conformal factors.
    #[staticmethod]
    fn from_factors(beta: f64, n_u: usize, n_v: usize, factors: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: ks::GridMetric::new(beta, n_u, n_v, factors).map_err(to_py_err)? })
    }

    /// Conformal type `beta`.
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn n_u(&self) -> usize {
        self.inner.n_u()
    }

    #[getter]
    fn n_v(&self) -> usize {
        self.inner.n_v()
    }

    /// Total area under the trapezoidal quadrature of the grid.
    #[getter]
    fn volume(&self) -> f64 {
        self.inner.volume()
    }

    /// Grid spacings `(h_u, h_w)`.
    #[getter]
    fn spacing(&self) -> (f64, f64) {
        self.inner.spacing()
    }

    /// Conformal factor at node `(i, j)` (column `i` along `u`, row `j`).
    fn factor_at(&self, i: usize, j: usize) -> PyResult<f64> {
        if i >= self.inner.n_u() || j >= self.inner.n_v() {
            return Err(PyValueError::new_err(format!(
                "node ({i}, {j}) outside {} x {} grid",
                self.inner.n_u(),
                self.inner.n_v()
            )));
        }
        Ok(self.inner.factor_at(i, j))
    }

    /// Row-major copy of the factor table.
    fn factors(&self) -> Vec<f64> {
        self.inner.factors().to_vec()
    }

    /// Multiply the conformal factor by `c` pointwise.
    fn scale(&self, c: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.scale(c).map_err(to_py_err)? })
    }

    /// Drop every other node in each direction (requires odd dimensions).
    fn subsample_half(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.subsample_half().map_err(to_py_err)? })
    }

    /// Metric interchange JSON.
    fn to_json(&self) -> PyResult<String> {
        ks::MetricRecord::from(&self.inner).to_json().map_err(to_py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "GridMetric(beta={:.6}, n_u={}, n_v={}, volume={:.6})",
            self.beta(),
            self.n_u(),
            self.n_v(),
            self.volume()
        )
    }
}

fn as_metric(obj: &Bound<'_, PyAny>) -> PyResult<ks::Metric> {
    if let Ok(p) = obj.cast::<ProfileMetric>() {
        return Ok(ks::Metric::Profile(p.get().inner.clone()));
    }
    if let Ok(g) = obj.cast::<GridMetric>() {
        return Ok(ks::Metric::Grid(g.get().inner.clone()));
    }
    Err(PyTypeError::new_err("expected a ProfileMetric or GridMetric"))
}

fn wrap_metric(py: Python<'_>, m: ks::Metric) -> PyResult<Py<PyAny>> {
    match m {
        ks::Metric::Profile(inner) => Ok(ProfileMetric { inner }.into_pyobject(py)?.into_any().unbind()),
        ks::Metric::Grid(inner) => Ok(GridMetric { inner }.into_pyobject(py)?.into_any().unbind()),
    }
}

// ---------------------------------------------------------------------------
// Module functions.
// ---------------------------------------------------------------------------

/// Slugs of the five systolic inequalities.
#[pyfunction]
fn theorems() -> Vec<&'static str> {
    ["sigma-v", "sigma-n-v", "sigma-v-h", "mobius-sigma-v", "mobius-sys-v"].to_vec()
}

/// Slugs of the homotopy classes carrying a systole.
#[pyfunction]
fn homotopy_classes() -> Vec<&'static str> {
    ["sigma", "v", "h"].to_vec()
}

/// Optimal constant of a theorem at conformal type `beta`.
#[pyfunction]
fn constant<'py>(py: Python<'py>, theorem: &str, beta: f64) -> PyResult<Bound<'py, PyDict>> {
    let ineq = parse_theorem(theorem)?;
    let r = constants::constant_for(ineq, beta).map_err(to_py_err)?;
    constant_dict(py, &r)
}

/// Regime threshold of a theorem's conformal type, `None` for the
/// single-regime product family.
#[pyfunction]
fn threshold(theorem: &str) -> PyResult<Option<f64>> {
    Ok(constants::threshold(parse_theorem(theorem)?))
}

/// Optimal constants on a geometric grid of `steps` conformal types.
#[pyfunction]
fn sweep_constants<'py>(
    py: Python<'py>,
    theorem: &str,
    beta_min: f64,
    beta_max: f64,
    steps: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let ineq = parse_theorem(theorem)?;
    let rows = py
        .detach(move || constants::sweep(ineq, beta_min, beta_max, steps))
        .map_err(to_py_err)?;
    rows.iter().map(|r| constant_dict(py, r)).collect()
}

/// Solve one of the defining transcendental equations: `b0`,
/// `omega-sigma-v`, `omega-sigma-v-h`, or `b-sigma-n-v` (the latter three
/// need `beta`).
#[pyfunction]
#[pyo3(signature = (equation, beta = None))]
fn solve<'py>(py: Python<'py>, equation: &str, beta: Option<f64>) -> PyResult<Bound<'py, PyDict>> {
    let require_beta = |beta: Option<f64>| -> PyResult<f64> {
        beta.ok_or_else(|| PyValueError::new_err(format!("beta is required for {equation}")))
    };
    let solve = match equation {
        "b0" => solvers::find_root(|x| x.tan() - 2.0 * x, 1.0, 1.5).map_err(to_py_err)?,
        "omega-sigma-v" => {
            solvers::omega_from_beta_sigma_v(require_beta(beta)?).map_err(to_py_err)?
        }
        "omega-sigma-v-h" => {
            solvers::omega_from_beta_sigma_v_h(require_beta(beta)?).map_err(to_py_err)?
        }
        "b-sigma-n-v" => {
            let beta = require_beta(beta)?;
            let b = solvers::b_from_beta_sigma_n_v(beta).map_err(to_py_err)?;
            // Closed form; the residual re-substitutes the defining
            // relation beta(b) = threshold + 4(b - pi/3).
            let threshold = 2.0 * (2.0 + 3.0f64.sqrt()).ln();
            let residual =
                (threshold + 4.0 * (b - std::f64::consts::FRAC_PI_3) - beta).abs();
            solvers::RootSolve { root: b, residual, iterations: 0, bracket: (b, b) }
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown equation {other}; expected b0 | omega-sigma-v | omega-sigma-v-h | b-sigma-n-v"
            )))
        }
    };
    root_dict(py, equation, beta, &solve)
}

/// Extremal metric of a theorem at conformal type `beta`, as
/// `(spec_dict, ProfileMetric)`.
#[pyfunction]
fn extremal<'py>(
    py: Python<'py>,
    theorem: &str,
    beta: f64,
) -> PyResult<(Bound<'py, PyDict>, ProfileMetric)> {
    let ineq = parse_theorem(theorem)?;
    let (spec, metric) = ks::extremal::extremal_for_beta(ineq, beta).map_err(to_py_err)?;
    Ok((extremal_spec_dict(py, &spec)?, ProfileMetric { inner: metric }))
}

/// Systole report (class lengths, volume, error estimates) of a metric.
/// Profiles use closed forms where available; grids run graph searches at
/// the grid's own resolution, profiles are resampled at `n_u x n_v`.
#[pyfunction]
#[pyo3(signature = (metric, n_u = 512, n_v = 512, classes = None))]
fn systoles<'py>(
    py: Python<'py>,
    metric: &Bound<'py, PyAny>,
    n_u: usize,
    n_v: usize,
    classes: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let metric = as_metric(metric)?;
    let classes = match classes {
        Some(names) => parse_classes(names)?,
        None => ks::HomotopyClass::ALL.to_vec(),
    };
    let report = py
        .detach(move || systole::systole_report(&metric, n_u, n_v, &classes))
        .map_err(to_py_err)?;
    systole_dict(py, &report)
}

/// Measure-calculus certificate of a theorem's optimal constant at
/// conformal type `beta` (flat-spherical regimes only).
#[pyfunction]
#[pyo3(signature = (theorem, beta, tol_push = 1e-3, tol_mass = 1e-10))]
fn certify<'py>(
    py: Python<'py>,
    theorem: &str,
    beta: f64,
    tol_push: f64,
    tol_mass: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let ineq = parse_theorem(theorem)?;
    let tol = ks::ToleranceSpec { tol_push, tol_mass };
    let cert = py
        .detach(move || measure::certify_for_beta(ineq, beta, tol))
        .map_err(to_py_err)?;
    certificate_dict(py, &cert)
}

/// Randomized verification sweep: `samples` perturbed metrics at conformal
/// type `beta`, each checked against the theorem's optimal constant.
#[pyfunction]
#[pyo3(signature = (theorem, beta, samples = 200, seed = 1, amplitude = 0.5, modes = 4, n_u = 128, n_v = 128))]
#[allow(clippy::too_many_arguments)]
fn verify_inequality<'py>(
    py: Python<'py>,
    theorem: &str,
    beta: f64,
    samples: usize,
    seed: u64,
    amplitude: f64,
    modes: u32,
    n_u: usize,
    n_v: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let ineq = parse_theorem(theorem)?;
    let spec = ks::PerturbationSpec::new(seed, amplitude, modes, n_u, n_v).map_err(to_py_err)?;
    let result = py
        .detach(move || verification::run_inequality_sweep(ineq, beta, samples, &spec))
        .map_err(to_py_err)?;
    sweep_dict(py, &result)
}

/// One random deck-compatible conformal perturbation of a profile metric.
#[pyfunction]
#[pyo3(signature = (base, seed, amplitude = 0.5, modes = 4, n_u = 128, n_v = 128))]
fn random_conformal_factor(
    py: Python<'_>,
    base: &ProfileMetric,
    seed: u64,
    amplitude: f64,
    modes: u32,
    n_u: usize,
    n_v: usize,
) -> PyResult<GridMetric> {
    let spec = ks::PerturbationSpec::new(seed, amplitude, modes, n_u, n_v).map_err(to_py_err)?;
    let base = base.inner.clone();
    let grid = py
        .detach(move || verification::random_conformal_factor(&base, &spec))
        .map_err(to_py_err)?;
    Ok(GridMetric { inner: grid })
}

/// Probe the constants' asymptotic claims (unboundedness, the limit of the
/// non-vertical constant, the sign of the product constant's slope).
#[pyfunction]
fn probe_asymptotics(py: Python<'_>) -> PyResult<Bound<'_, PyDict>> {
    let report = py.detach(verification::probe_asymptotics).map_err(to_py_err)?;
    asymptotics_dict(py, &report)
}

/// Load a metric interchange file as a `ProfileMetric` or `GridMetric`.
#[pyfunction]
fn read_metric(py: Python<'_>, path: PathBuf) -> PyResult<Py<PyAny>> {
    let metric = ks::io::read_metric(&path).map_err(to_py_err)?;
    wrap_metric(py, metric)
}

/// Parse metric interchange JSON as a `ProfileMetric` or `GridMetric`.
#[pyfunction]
fn metric_from_json(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let metric = ks::MetricRecord::from_json(text)
        .and_then(ks::MetricRecord::into_metric)
        .map_err(to_py_err)?;
    wrap_metric(py, metric)
}

/// Write a metric to a metric interchange file.
#[pyfunction]
fn write_metric(metric: &Bound<'_, PyAny>, path: PathBuf) -> PyResult<()> {
    let record = match as_metric(metric)? {
        ks::Metric::Profile(p) => ks::MetricRecord::from(&p),
        ks::Metric::Grid(g) => ks::MetricRecord::from(&g),
    };
    ks::io::write_metric(&path, &record).map_err(to_py_err)
}

#[pymodule]
fn klein_systolic_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ProfileMetric>()?;
    m.add_class::<GridMetric>()?;
    m.add_function(wrap_pyfunction!(theorems, m)?)?;
    m.add_function(wrap_pyfunction!(homotopy_classes, m)?)?;
    m.add_function(wrap_pyfunction!(constant, m)?)?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_constants, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(extremal, m)?)?;
    m.add_function(wrap_pyfunction!(systoles, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_inequality, m)?)?;
    m.add_function(wrap_pyfunction!(random_conformal_factor, m)?)?;
    m.add_function(wrap_pyfunction!(probe_asymptotics, m)?)?;
    m.add_function(wrap_pyfunction!(read_metric, m)?)?;
    m.add_function(wrap_pyfunction!(metric_from_json, m)?)?;
    m.add_function(wrap_pyfunction!(write_metric, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

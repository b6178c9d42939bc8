//! End-to-end inequality verification: Monte-Carlo sweeps over random
//! conformal factors, equality checks at the extremal metrics, and
//! asymptotic probes of the optimal constants.
//!
//! A sweep draws deck-compatible conformal perturbations of the extremal
//! metric, measures the systoles and volume of each sample on the grid, and
//! checks the scale-invariant ratio `prod l_i / (C_beta vol^{p/2}) <= 1` up
//! to the grid tolerance. Passing sweeps are evidence, not proof — the
//! measure certificates carry the actual optimality argument.

use crate::error::{Error, Result};
use crate::extremal::{self, Inequality};
use crate::geometry::GridMetric;
use crate::io::f64_str;
use crate::measure::inequality_ratio;
use crate::par;
use crate::systole::{length_graph_budgeted, HomotopyClass, SearchBudget};
use crate::{constants, geometry::ProfileMetric};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Maximum Fourier modes per axis; low frequencies only, so that the grid
/// resolutions in play resolve every sampled perturbation.
pub const MAX_MODES: u32 = 8;

/// Grid tolerance for inequality checks at sweep resolutions: stencil
/// metrication overestimates lengths by at most ~2% at 128^2 and finer,
/// leaving 3% as the decision margin.
pub const TOL_GRID: f64 = 0.03;

/// A reproducible random conformal perturbation.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub seed: u64,
    /// Relative size of the factor modulation; the sampled factor is
    /// `extremal x (1 + amplitude S)` with `|S| <= 1`, so any value below
    /// `1` keeps the metric positive.
    #[serde(with = "f64_str")]
    pub amplitude: f64,
    /// Fourier modes kept per axis (`<= 8`).
    pub modes_u: u32,
    pub modes_v: u32,
    /// Grid resolution the factor is sampled at.
    pub n_u: usize,
    pub n_v: usize,
}

impl PerturbationSpec {
    pub fn new(seed: u64, amplitude: f64, modes: u32, n_u: usize, n_v: usize) -> Result<Self> {
        let spec = Self { seed, amplitude, modes_u: modes, modes_v: modes, n_u, n_v };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.amplitude) {
            return Err(Error::OutOfRange(format!(
                "amplitude must lie in [0, 1), got {} (1 would allow a degenerate factor)",
                self.amplitude
            )));
        }
        if self.modes_u > MAX_MODES || self.modes_v > MAX_MODES {
            return Err(Error::OutOfRange(format!(
                "at most {MAX_MODES} modes per axis, got {}x{}",
                self.modes_u, self.modes_v
            )));
        }
        Ok(())
    }

    fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn doubled(mut self) -> Self {
        // Doubling inserts midpoints while keeping every existing node, so
        // the refined factor samples the same smooth metric.
        self.n_u = 2 * self.n_u - 1;
        self.n_v = 2 * self.n_v - 1;
        self
    }
}

/// One admissible basis term `T_u(k u) T_w(m pi w / beta)` of the
/// deck-compatible trigonometric polynomial.
#[derive(Clone, Copy)]
struct Mode {
    k: u32,
    m: u32,
    u_is_sin: bool,
    w_is_sin: bool,
    coeff: f64,
}

/// Enumerate the deck-compatible basis: the glide `(u, w) -> (u + pi, -w)`
/// multiplies `cos/sin(k u)` by `(-1)^k` and flips the sign of the odd
/// `w`-factors, so even `k` pairs with `cos(m pi w / beta)` and odd `k`
/// with `sin(m pi w / beta)`. The constant term is excluded (it would be a
/// pure scaling, not a shape perturbation).
fn admissible_modes(modes_u: u32, modes_v: u32) -> Vec<Mode> {
    let mut basis = Vec::new();
    for k in 0..=modes_u {
        for m in 0..=modes_v {
            for u_is_sin in [false, true] {
                if u_is_sin && k == 0 {
                    continue;
                }
                let w_is_sin = k % 2 == 1;
                if w_is_sin && m == 0 {
                    continue;
                }
                if !u_is_sin && k == 0 && m == 0 {
                    continue;
                }
                basis.push(Mode { k, m, u_is_sin, w_is_sin, coeff: 0.0 });
            }
        }
    }
    basis
}

fn uniform_pm1(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits -> [0, 1) -> [-1, 1).
    ((rng.next_u64() >> 11) as f64) * (2.0 / 9007199254740992.0) - 1.0
}

/// Sample a deck-compatible random conformal metric: the extremal factor of
/// `base` times `1 + amplitude S(u, w)`, where `S` is a random symmetric
/// trigonometric polynomial normalized to `|S| <= 1`. Deterministic per
/// seed.
pub fn random_conformal_factor(base: &ProfileMetric, spec: &PerturbationSpec) -> Result<GridMetric> {
    spec.validate()?;
    let grid = base.to_conformal_grid(spec.n_u, spec.n_v)?;
    if spec.amplitude == 0.0 {
        return Ok(grid);
    }
    let mut basis = admissible_modes(spec.modes_u, spec.modes_v);
    if basis.is_empty() {
        return Ok(grid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut total = 0.0;
    for mode in &mut basis {
        mode.coeff = uniform_pm1(&mut rng);
        total += mode.coeff.abs();
    }
    for mode in &mut basis {
        mode.coeff /= total;
    }

    let (n_u, n_v) = (spec.n_u, spec.n_v);
    let (pu, pv) = (n_u - 1, n_v - 1);
    // 1-D node tables, mirror-copied so the deck identifications hold
    // bit-exactly: u_i = pi (2i - pu) / (2 pu) is odd around the middle
    // column and w_j = beta (2j - pv) / pv odd around the middle row.
    let mut tables_u: Vec<(Vec<f64>, Vec<f64>)> = Vec::new(); // (cos k u, sin k u)
    for k in 0..=spec.modes_u {
        let mut c = vec![0.0; n_u];
        let mut s = vec![0.0; n_u];
        for i in 0..=pu / 2 {
            let arg = PI * k as f64 * (2.0 * i as f64 - pu as f64) / (2.0 * pu as f64);
            c[i] = arg.cos();
            s[i] = arg.sin();
            c[pu - i] = c[i];
            s[pu - i] = -s[i];
        }
        tables_u.push((c, s));
    }
    let mut tables_w: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for m in 0..=spec.modes_v {
        let mut c = vec![0.0; n_v];
        let mut s = vec![0.0; n_v];
        for j in 0..=pv / 2 {
            let arg = PI * m as f64 * (2.0 * j as f64 - pv as f64) / pv as f64;
            c[j] = arg.cos();
            s[j] = arg.sin();
            c[pv - j] = c[j];
            s[pv - j] = -s[j];
        }
        tables_w.push((c, s));
    }

    let mut factors = grid.factors().to_vec();
    for j in 0..n_v {
        for i in 0..n_u {
            let mut sum = 0.0;
            for mode in &basis {
                let tu = if mode.u_is_sin {
                    tables_u[mode.k as usize].1[i]
                } else {
                    tables_u[mode.k as usize].0[i]
                };
                let tw = if mode.w_is_sin {
                    tables_w[mode.m as usize].1[j]
                } else {
                    tables_w[mode.m as usize].0[j]
                };
                sum += mode.coeff * tu * tw;
            }
            factors[j * n_u + i] *= 1.0 + spec.amplitude * sum;
        }
    }
    GridMetric::new(grid.beta(), n_u, n_v, factors)
}

/// Homotopy classes whose graph lengths a sweep must measure.
fn classes_for(family: Inequality) -> &'static [HomotopyClass] {
    match family {
        Inequality::SigmaV => &[HomotopyClass::Sigma, HomotopyClass::Vertical],
        Inequality::SigmaNV => {
            &[HomotopyClass::Sigma, HomotopyClass::Horizontal, HomotopyClass::Vertical]
        }
        Inequality::SigmaVH => {
            &[HomotopyClass::Sigma, HomotopyClass::Vertical, HomotopyClass::Horizontal]
        }
        Inequality::MobiusSigmaV | Inequality::MobiusSysV => unreachable!("sweeps run on the double cover"),
    }
}

/// Search budget for Monte-Carlo samples: perturbed grids have no exact
/// tie plateaus, so Lipschitz pruning converges with far fewer basepoint
/// evaluations than the exhaustive default. Skipping evaluations can only
/// raise the measured lengths (the value stays an upper bound), which is
/// conservative for violation detection and absorbed by the grid tolerance
/// in the equality check.
const SWEEP_BUDGET: SearchBudget = SearchBudget { max_evals_per_family: 40, prune_slack: 0.01 };

/// The length factors entering the product for one sample.
fn product_lengths(family: Inequality, grid: &GridMetric) -> Result<Vec<f64>> {
    let mut by_class = Vec::new();
    for &class in classes_for(family) {
        by_class.push(length_graph_budgeted(class, grid, SWEEP_BUDGET)?.0);
    }
    Ok(match family {
        Inequality::SigmaV => by_class,
        // min(l_sigma, l_h) is the non-vertical systole.
        Inequality::SigmaNV => vec![by_class[0].min(by_class[1]), by_class[2]],
        Inequality::SigmaVH => by_class,
        Inequality::MobiusSigmaV | Inequality::MobiusSysV => unreachable!(),
    })
}

/// One sample of a sweep, kept for reproducibility.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub seed: u64,
    #[serde(with = "f64_str")]
    pub ratio: f64,
    /// Ratio at doubled resolution, when the first pass came close enough
    /// to the bound to warrant a rerun.
    #[serde(with = "f64_str::optional", default, skip_serializing_if = "Option::is_none")]
    pub refined_ratio: Option<f64>,
    pub violation: bool,
}

/// Outcome of a Monte-Carlo inequality sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    #[serde(rename = "theorem")]
    pub inequality: Inequality,
    #[serde(with = "f64_str")]
    pub beta: f64,
    pub samples: usize,
    #[serde(with = "f64_str")]
    pub amplitude: f64,
    pub modes_u: u32,
    pub modes_v: u32,
    pub n_u: usize,
    pub n_v: usize,
    pub base_seed: u64,
    /// Optimal constant the samples are tested against.
    #[serde(rename = "C", with = "f64_str")]
    pub c: f64,
    #[serde(with = "f64_str")]
    pub tol_grid: f64,
    /// Largest `prod l_i / (C vol^{p/2})` over the samples.
    #[serde(with = "f64_str")]
    pub worst_ratio: f64,
    pub worst_seed: u64,
    /// `|ratio - 1|` for the unperturbed extremal metric on the same grid.
    #[serde(with = "f64_str")]
    pub equality_gap: f64,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_seed: Option<u64>,
    pub pass: bool,
    pub outcomes: Vec<SampleOutcome>,
}

/// Run `n_samples` random-metric checks of an inequality at conformal type
/// `beta` (Moebius families delegate to their orientable double cover at
/// twice the type). Sample `i` uses seed `base seed + i`; any sample whose
/// ratio lands within half a tolerance of the bound is re-measured at
/// doubled resolution before being declared a violation.
pub fn run_inequality_sweep(
    inequality: Inequality,
    beta: f64,
    n_samples: usize,
    spec: &PerturbationSpec,
) -> Result<SweepResult> {
    spec.validate()?;
    let c = constants::constant_for(inequality, beta)?.c;
    let family = inequality.klein_family();
    let family_beta = inequality.klein_beta(beta);
    let (_, base) = extremal::extremal_for_beta(family, family_beta)?;

    let sample = |seed: u64, s: &PerturbationSpec| -> Result<f64> {
        let grid = random_conformal_factor(&base, &s.with_seed(seed))?;
        let lengths = product_lengths(family, &grid)?;
        Ok(inequality_ratio(&lengths, grid.volume(), c))
    };

    // Equality at the unperturbed extremal, measured on the same grid.
    let extremal_ratio = sample(0, &spec.with_amplitude_zero())?;
    let equality_gap = (extremal_ratio - 1.0).abs();

    let raw: Vec<Result<f64>> =
        par::map_indexed(n_samples, |i| sample(spec.seed.wrapping_add(i as u64), spec));
    let mut outcomes = Vec::with_capacity(n_samples);
    for (i, r) in raw.into_iter().enumerate() {
        let seed = spec.seed.wrapping_add(i as u64);
        let ratio = r?;
        // Near-violation: re-measure before trusting a coarse grid.
        let (refined_ratio, decisive) = if ratio > 1.0 + 0.5 * TOL_GRID {
            (Some(sample(seed, &spec.doubled())?), true)
        } else {
            (None, false)
        };
        let effective = if decisive { refined_ratio.unwrap() } else { ratio };
        outcomes.push(SampleOutcome {
            seed,
            ratio,
            refined_ratio,
            violation: effective > 1.0 + TOL_GRID,
        });
    }

    let worst = outcomes
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .map(|o| (o.ratio, o.seed))
        .unwrap_or((extremal_ratio, spec.seed));
    let violations = outcomes.iter().filter(|o| o.violation).count();
    let failing_seed = outcomes.iter().find(|o| o.violation).map(|o| o.seed);
    let pass = violations == 0 && equality_gap <= TOL_GRID;
    Ok(SweepResult {
        inequality,
        beta,
        samples: n_samples,
        amplitude: spec.amplitude,
        modes_u: spec.modes_u,
        modes_v: spec.modes_v,
        n_u: spec.n_u,
        n_v: spec.n_v,
        base_seed: spec.seed,
        c,
        tol_grid: TOL_GRID,
        worst_ratio: worst.0,
        worst_seed: worst.1,
        equality_gap,
        violations,
        failing_seed,
        pass,
        outcomes,
    })
}

impl PerturbationSpec {
    fn with_amplitude_zero(mut self) -> Self {
        self.amplitude = 0.0;
        self
    }
}

/// One evaluated point of an asymptotic probe.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbePoint {
    #[serde(with = "f64_str")]
    pub beta: f64,
    #[serde(rename = "C", with = "f64_str")]
    pub c: f64,
}

/// Monotone approach of the non-vertical-systole constant to its limit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitProbe {
    pub grid: Vec<ProbePoint>,
    pub monotone_increasing: bool,
    /// `2 - C(10^6)`; positive and tiny when the approach is from below.
    #[serde(with = "f64_str")]
    pub limit_gap: f64,
}

/// Sign of `dC/domega` along the three-systole extremal family, with a
/// step-halving stability check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeProbe {
    #[serde(with = "f64_str::vec")]
    pub omegas: Vec<f64>,
    #[serde(with = "f64_str::vec")]
    pub derivatives: Vec<f64>,
    #[serde(with = "f64_str::vec")]
    pub derivatives_refined: Vec<f64>,
    /// `-1` when the constant strictly decreases in the cap angle.
    pub sign: i32,
    pub stable_under_refinement: bool,
}

/// Asymptotics of the three optimal constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    /// An explicit type where the glide-vertical constant exceeds 100:
    /// no finite constant works for all conformal types.
    pub sigma_v_unbounded: ProbePoint,
    /// Log-grid approach of the non-vertical constant to 2.
    pub sigma_n_v_limit: LimitProbe,
    /// An explicit small type where the three-systole constant exceeds 100.
    pub sigma_v_h_unbounded: ProbePoint,
    /// Sign of the three-systole constant's dependence on the cap angle.
    pub product_slope: SlopeProbe,
    pub pass: bool,
}

/// Probe the constants' asymptotic claims: unboundedness of the
/// glide-vertical and three-systole constants, the non-vertical constant's
/// monotone approach to 2, and the sign of the three-systole constant's
/// cap-angle derivative.
pub fn probe_asymptotics() -> Result<AsymptoticsReport> {
    // Push omega toward pi/2: C = 1/(2 cos omega) grows without bound while
    // beta(omega) stays finite.
    let omega = PI / 2.0 - 4e-3;
    let beta_big = crate::solvers::sigma_v_beta_of_omega(omega);
    let sigma_v_unbounded = ProbePoint { beta: beta_big, c: constants::c_sigma_v(beta_big)?.c };

    // beta from 10 to 10^6, two points per decade.
    let mut grid = Vec::new();
    for i in 0..=10 {
        let beta = 10f64.powf(1.0 + 0.5 * i as f64);
        grid.push(ProbePoint { beta, c: constants::c_sigma_n_v(beta)?.c });
    }
    let monotone = grid.windows(2).all(|p| p[1].c > p[0].c);
    let last = grid.last().expect("grid is nonempty").c;
    let sigma_n_v_limit =
        LimitProbe { grid, monotone_increasing: monotone, limit_gap: 2.0 - last };

    // Small cap angle: the three-systole constant blows up like
    // sqrt(pi / (2 omega)) as beta -> 0+, so clearing 100 needs
    // omega < pi / 20000.
    let omega_small = 1e-5;
    let beta_small = crate::solvers::sigma_v_h_beta_of_omega(omega_small);
    let sigma_v_h_unbounded =
        ProbePoint { beta: beta_small, c: constants::c_sigma_v_h(beta_small)?.c };

    // dC/domega along the extremal family, central differences at two step
    // sizes.
    let c_of_omega = |omega: f64| -> f64 {
        let b = crate::solvers::sigma_v_h_b_of_omega(omega);
        constants::product_constant_published(omega, b)
    };
    let omegas: Vec<f64> = vec![0.2, 0.5, 0.8, 1.1, 1.4];
    let diff = |h: f64| -> Vec<f64> {
        omegas.iter().map(|&w| (c_of_omega(w + h) - c_of_omega(w - h)) / (2.0 * h)).collect()
    };
    let derivatives = diff(1e-4);
    let derivatives_refined = diff(5e-5);
    let all_negative = derivatives.iter().all(|d| *d < 0.0);
    let stable = derivatives
        .iter()
        .zip(derivatives_refined.iter())
        .all(|(a, b)| (a < &0.0) == (b < &0.0) && (a - b).abs() <= 1e-3 * a.abs().max(b.abs()));
    let product_slope = SlopeProbe {
        omegas,
        derivatives,
        derivatives_refined,
        sign: if all_negative { -1 } else { 1 },
        stable_under_refinement: stable,
    };

    let pass = sigma_v_unbounded.c > 100.0
        && sigma_n_v_limit.monotone_increasing
        && sigma_n_v_limit.limit_gap > 0.0
        && sigma_n_v_limit.limit_gap < 1e-4
        && sigma_v_h_unbounded.c > 100.0
        && product_slope.sign == -1
        && product_slope.stable_under_refinement;
    Ok(AsymptoticsReport {
        sigma_v_unbounded,
        sigma_n_v_limit,
        sigma_v_h_unbounded,
        product_slope,
        pass,
    })
}

//! Acceptance suite: nine end-to-end checks of the constants, solvers,
//! measure certificates, systole engine, and verification sweeps, each
//! reporting one pass/fail line (written straight to stderr so the lines
//! show even under the test harness's output capture).

use std::f64::consts::{FRAC_PI_3, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use klein_systolic::extremal::product_band_extremal;
use klein_systolic::measure::{
    certificate_setup, certify_for_beta, common_weighted_mass, family_masses, ToleranceSpec,
};
use klein_systolic::systole::systole_report;
use klein_systolic::verification::{probe_asymptotics, run_inequality_sweep, PerturbationSpec};
use klein_systolic::{constants, solvers, FamilyKind, HomotopyClass, Inequality, Metric,
    ProfileMetric};

fn report(line: &str) {
    // Bypass libtest's capture so every criterion prints its line.
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

fn err_str(e: klein_systolic::Error) -> String {
    format!("error: {e}")
}

/// Optimal constant at `beta`, as the public API reports it.
fn c_of(ineq: Inequality, beta: f64) -> Result<constants::ConstantResult, String> {
    constants::constant_for(ineq, beta).map_err(err_str)
}

// --------------------------------------------------------------------------
// 1. The isosystolic cross-check constant.
// --------------------------------------------------------------------------
fn criterion_1() -> Result<String, String> {
    let beta = 2.0 * (3.0 * PI / 8.0).tan().ln();
    let target = PI / (2.0 * 2.0f64.sqrt());
    c_of(Inequality::SigmaV, beta)?; // warm call
    let t = Instant::now();
    let c = c_of(Inequality::SigmaV, beta)?.c;
    let dt = t.elapsed();
    let gap = (c - target).abs();
    if gap > 1e-12 {
        return Err(format!("|C - pi/(2 sqrt 2)| = {gap:.3e} exceeds 1e-12"));
    }
    if dt >= Duration::from_millis(1) {
        return Err(format!("evaluation took {:.3} ms (budget 1 ms)", dt.as_secs_f64() * 1e3));
    }
    Ok(format!(
        "C(2 ln tan(3 pi/8)) = pi/(2 sqrt 2) to {gap:.2e} in {:.1} us",
        dt.as_secs_f64() * 1e6
    ))
}

// --------------------------------------------------------------------------
// 2. Continuity of the constants across their regime thresholds.
// --------------------------------------------------------------------------
fn criterion_2() -> Result<String, String> {
    let t = Instant::now();
    // Independent threshold expressions straight from the definitions.
    let b0 = solvers::find_root(|x| x.tan() - 2.0 * x, 1.0, 1.5).map_err(err_str)?.root;
    let t1 = 2.0 * (PI / 4.0 + b0 / 2.0).tan().ln();
    let t2 = 2.0 * (2.0 + 3.0f64.sqrt()).ln();
    for (ineq, thr) in [(Inequality::SigmaV, t1), (Inequality::SigmaNV, t2)] {
        let lo = c_of(ineq, thr * (1.0 - 1e-12))?;
        let hi = c_of(ineq, thr * (1.0 + 1e-12))?;
        if lo.regime == hi.regime {
            return Err(format!("{}: threshold {thr} does not separate regimes", ineq.slug()));
        }
        let jump = (lo.c - hi.c).abs();
        if jump > 1e-9 {
            return Err(format!("{}: regime formulas differ by {jump:.3e} at the threshold",
                ineq.slug()));
        }
    }
    let c2 = c_of(Inequality::SigmaNV, t2)?.c;
    let target = 2.0 * PI / (3.0 * 3.0f64.sqrt());
    let gap = (c2 - target).abs();
    if gap > 1e-9 {
        return Err(format!("threshold constant differs from 2 pi/(3 sqrt 3) by {gap:.3e}"));
    }
    let dt = t.elapsed();
    if dt >= Duration::from_secs(1) {
        return Err(format!("took {:.2} s (budget 1 s)", dt.as_secs_f64()));
    }
    Ok(format!(
        "both families continuous at their thresholds; threshold value 2 pi/(3 sqrt 3) to \
         {gap:.2e}; {:.2} ms",
        dt.as_secs_f64() * 1e3
    ))
}

// --------------------------------------------------------------------------
// 3. Solver residuals and re-substituted defining relations.
// --------------------------------------------------------------------------
fn criterion_3() -> Result<String, String> {
    const TOL: f64 = 1e-10;
    let mut worst: f64 = 0.0;

    let b0 = solvers::find_root(|x| x.tan() - 2.0 * x, 1.0, 1.5).map_err(err_str)?;
    worst = worst.max(b0.residual).max((b0.root.tan() - 2.0 * b0.root).abs());

    let t1 = constants::threshold(Inequality::SigmaV).expect("two-regime family");
    for beta in linspace(t1 * 1.001, 10.0, 100) {
        let solve = solvers::omega_from_beta_sigma_v(beta).map_err(err_str)?;
        worst = worst.max(solve.residual);
        let r = c_of(Inequality::SigmaV, beta)?;
        let (omega, b) = (r.omega.expect("omega"), r.b.expect("b"));
        worst = worst.max((omega.tan() - (b + omega)).abs());
    }
    for beta in logspace(0.05, 50.0, 100) {
        let solve = solvers::omega_from_beta_sigma_v_h(beta).map_err(err_str)?;
        worst = worst.max(solve.residual);
        let r = c_of(Inequality::SigmaVH, beta)?;
        let (omega, b) = (r.omega.expect("omega"), r.b.expect("b"));
        worst = worst.max((omega.tan() - (b * b - omega * omega) / (2.0 * b - omega)).abs());
    }
    let t2 = constants::threshold(Inequality::SigmaNV).expect("two-regime family");
    for beta in linspace(t2 * 1.001, 50.0, 100) {
        let b = c_of(Inequality::SigmaNV, beta)?.b.expect("b");
        worst = worst.max((t2 + 4.0 * (b - FRAC_PI_3) - beta).abs());
    }
    if worst > TOL {
        return Err(format!("worst residual {worst:.3e} exceeds {TOL:.0e}"));
    }
    Ok(format!("all root and re-substitution residuals <= {worst:.2e} over 100 types per family"))
}

// --------------------------------------------------------------------------
// 4. Algebraic identities behind the closed forms.
// --------------------------------------------------------------------------

/// Measure-construction constant from closed-form masses: group the family
/// masses by inequality factor and form `vol^{p/2} / (p^p prod_i m_i)`.
fn measure_constant(ineq: Inequality, beta: f64) -> Result<f64, String> {
    let (metric, families) = certificate_setup(ineq, beta).map_err(err_str)?;
    let mass = |kind: FamilyKind| -> f64 {
        families.iter().filter(|f| f.family == kind).map(|f| f.mass).sum()
    };
    let groups: Vec<f64> = match ineq {
        Inequality::SigmaV => vec![mass(FamilyKind::GreatCircles), mass(FamilyKind::Verticals)],
        Inequality::SigmaNV => vec![
            mass(FamilyKind::GreatCircles) + mass(FamilyKind::Horizontals),
            mass(FamilyKind::Verticals),
        ],
        Inequality::SigmaVH => vec![
            mass(FamilyKind::GreatCircles),
            mass(FamilyKind::Verticals),
            mass(FamilyKind::Horizontals),
        ],
        _ => return Err("no measure construction for Moebius families".into()),
    };
    let p = groups.len() as i32;
    let vol = metric.volume();
    Ok(vol.powf(p as f64 / 2.0) / ((p as f64).powi(p) * groups.iter().product::<f64>()))
}

fn criterion_4() -> Result<String, String> {
    // (i) The quartic radicand of the product constant is the sum of squares
    // (2b - omega)^2 + (b^2 - omega^2)^2, for any parameters.
    for (k, omega) in linspace(0.05, PI / 2.0 - 0.05, 50).into_iter().enumerate() {
        let b = omega + 0.05 + 0.06 * k as f64;
        let radicand = (2.0 * b - omega).powi(2) + (b * b - omega * omega).powi(2);
        let rebuilt = (PI.sqrt() / (3.0 * 3.0f64.sqrt())) * radicand.powf(0.25)
            * (2.0 * b - omega)
            / ((b - omega) * ((b - omega) * b).sqrt());
        let published = constants::product_constant_published(omega, b);
        if (rebuilt - published).abs() > 1e-12 * published {
            return Err(format!(
                "radicand identity fails at omega = {omega}, b = {b}: {rebuilt} vs {published}"
            ));
        }
    }

    // (ii) The measure-derived constant matches the printed one.
    let t1 = constants::threshold(Inequality::SigmaV).expect("threshold");
    let t2 = constants::threshold(Inequality::SigmaNV).expect("threshold");
    let mut worst_c: f64 = 0.0;
    for (ineq, betas) in [
        (Inequality::SigmaV, linspace(t1 * 1.01, 20.0, 50)),
        (Inequality::SigmaNV, linspace(t2 * 1.01, 20.0, 50)),
        (Inequality::SigmaVH, logspace(0.05, 20.0, 50)),
    ] {
        for beta in betas {
            let derived = measure_constant(ineq, beta)?;
            let printed = c_of(ineq, beta)?.c;
            let rel = (derived - printed).abs() / printed;
            worst_c = worst_c.max(rel);
            if rel > 1e-9 {
                return Err(format!(
                    "{} at beta = {beta}: measure C {derived} vs printed C {printed}",
                    ineq.slug()
                ));
            }
        }
    }

    // (iii) The balanced vertical weight of the non-vertical family: solve
    // the (affine) equal-weighted-mass condition and compare to the printed
    // closed form pi (sqrt 3 + b - pi/3) / (4b).
    for b in linspace(FRAC_PI_3 + 0.01, 10.0, 50) {
        let balance = |m: f64| {
            let (m1, _, m3) = family_masses(FRAC_PI_3, b, m);
            (m1 + m3) * PI - m * 4.0 * b
        };
        let (f0, f1) = (balance(0.0), balance(1.0));
        let solved = f0 / (f0 - f1);
        let printed = PI * (3.0f64.sqrt() + b - FRAC_PI_3) / (4.0 * b);
        if (solved - printed).abs() > 1e-14 * printed {
            return Err(format!("balanced m' {solved} differs from printed {printed} at b = {b}"));
        }
    }

    // (iv) Moebius constants are the Klein constants at the doubled type.
    for beta in logspace(0.05, 500.0, 50) {
        let pairs = [
            (c_of(Inequality::MobiusSigmaV, beta)?.c, c_of(Inequality::SigmaV, 2.0 * beta)?.c),
            (c_of(Inequality::MobiusSysV, beta)?.c, c_of(Inequality::SigmaNV, 2.0 * beta)?.c),
        ];
        for (mobius, klein) in pairs {
            if mobius != klein {
                return Err(format!(
                    "Moebius constant {mobius} differs from doubled-type Klein constant {klein} \
                     at beta = {beta}"
                ));
            }
        }
    }
    Ok(format!(
        "radicand, balanced-weight, and double-cover identities hold; measure C matches printed \
         C to {worst_c:.2e} at 150 parameters"
    ))
}

// --------------------------------------------------------------------------
// 5. Quadrature certificates for the measure constructions.
// --------------------------------------------------------------------------
fn criterion_5() -> Result<String, String> {
    let t = Instant::now();
    let cases = [
        (Inequality::SigmaV, [3.5, 4.5, 6.0, 8.0, 12.0]),
        (Inequality::SigmaNV, [3.0, 4.0, 6.0, 9.0, 12.0]),
        (Inequality::SigmaVH, [0.3, 0.8, 1.5, 3.0, 6.0]),
    ];
    let mut worst_mass: f64 = 0.0;
    let mut worst_push: f64 = 0.0;
    for (ineq, betas) in cases {
        for beta in betas {
            let cert = certify_for_beta(ineq, beta, ToleranceSpec::default()).map_err(err_str)?;
            if !cert.valid || cert.eps_mass > 1e-10 || cert.eps_push > 1e-3 {
                return Err(format!(
                    "{} at beta = {beta}: valid = {}, eps_mass = {:.3e}, eps_push = {:.3e}",
                    ineq.slug(),
                    cert.valid,
                    cert.eps_mass,
                    cert.eps_push
                ));
            }
            if cert.push_residuals.len() != 7 {
                return Err(format!(
                    "{} at beta = {beta}: expected the 7-function suite, got {}",
                    ineq.slug(),
                    cert.push_residuals.len()
                ));
            }
            worst_mass = worst_mass.max(cert.eps_mass);
            worst_push = worst_push.max(cert.eps_push);
            if ineq == Inequality::SigmaVH {
                let gap = (3.0 * common_weighted_mass(&cert) - cert.volume).abs();
                if gap > 1e-9 * cert.volume {
                    return Err(format!(
                        "3M differs from vol by {gap:.3e} at beta = {beta} (volume {})",
                        cert.volume
                    ));
                }
            }
        }
    }
    let dt = t.elapsed();
    if dt >= Duration::from_secs(60) {
        return Err(format!("took {:.1} s (budget 60 s)", dt.as_secs_f64()));
    }
    Ok(format!(
        "15 certificates valid; worst eps_mass {worst_mass:.2e}, worst eps_push {worst_push:.2e}; \
         3M = vol for the product family; {:.1} s",
        dt.as_secs_f64()
    ))
}

// --------------------------------------------------------------------------
// 6. Systole engine accuracy on 512^2 grids.
// --------------------------------------------------------------------------
fn criterion_6() -> Result<String, String> {
    let t = Instant::now();
    let mut details = Vec::new();

    let mut check = |name: &str, measured: Option<f64>, estimate: Option<f64>, truth: f64|
     -> Result<(), String> {
        let measured = measured.ok_or_else(|| format!("{name}: length missing"))?;
        let estimate = estimate.ok_or_else(|| format!("{name}: error estimate missing"))?;
        let rel = (measured - truth).abs() / truth;
        if rel > 0.02 {
            return Err(format!("{name}: measured {measured} vs truth {truth} ({rel:.4} relative)"));
        }
        if (measured - truth).abs() > estimate {
            return Err(format!(
                "{name}: Richardson estimate {estimate:.2e} fails to bracket error {:.2e}",
                (measured - truth).abs()
            ));
        }
        details.push(format!("{name} {rel:.1e}"));
        Ok(())
    };

    // Double spherical cap: glide systole pi, vertical systole 4b.
    let b = 1.0;
    let cap = ProfileMetric::spherical_cap(b).map_err(err_str)?;
    let grid = cap.to_conformal_grid(512, 512).map_err(err_str)?;
    let rep = systole_report(
        &Metric::Grid(grid),
        512,
        512,
        &[HomotopyClass::Sigma, HomotopyClass::Vertical],
    )
    .map_err(err_str)?;
    check("cap sigma", rep.l_sigma, rep.error_estimate.l_sigma, PI)?;
    check("cap v", rep.l_v, rep.error_estimate.l_v, 4.0 * b)?;

    // Product-family extremal: horizontal systole 2 pi cos omega.
    let omega = 0.6;
    let band = product_band_extremal(omega).map_err(err_str)?;
    let grid = band.to_conformal_grid(512, 512).map_err(err_str)?;
    let rep = systole_report(&Metric::Grid(grid), 512, 512, &[HomotopyClass::Horizontal])
        .map_err(err_str)?;
    check("band h", rep.l_h, rep.error_estimate.l_h, 2.0 * PI * omega.cos())?;

    // Flat metric at type beta = 2: lengths (pi, 2 beta, 2 pi).
    let beta = 2.0;
    let flat = ProfileMetric::constant(1.0, beta).map_err(err_str)?;
    let grid = flat.to_conformal_grid(512, 512).map_err(err_str)?;
    let rep = systole_report(&Metric::Grid(grid), 512, 512, &HomotopyClass::ALL).map_err(err_str)?;
    check("flat sigma", rep.l_sigma, rep.error_estimate.l_sigma, PI)?;
    check("flat v", rep.l_v, rep.error_estimate.l_v, 2.0 * beta)?;
    check("flat h", rep.l_h, rep.error_estimate.l_h, 2.0 * PI)?;

    let dt = t.elapsed();
    if dt >= Duration::from_secs(120) {
        return Err(format!("took {:.1} s (budget 120 s)", dt.as_secs_f64()));
    }
    Ok(format!(
        "six closed-form lengths reproduced (relative errors {}), Richardson estimates bracket \
         the truth; {:.1} s",
        details.join(", "),
        dt.as_secs_f64()
    ))
}

// --------------------------------------------------------------------------
// 7. Monte-Carlo inequality sweeps.
// --------------------------------------------------------------------------
fn criterion_7() -> Result<String, String> {
    let t = Instant::now();
    let cases = [
        (Inequality::SigmaV, 2.0, 101u64),
        (Inequality::SigmaV, 5.0, 202),
        (Inequality::SigmaNV, 2.0, 303),
        (Inequality::SigmaNV, 6.0, 404),
        (Inequality::SigmaVH, 0.5, 505),
        (Inequality::SigmaVH, 2.0, 606),
    ];
    let mut worst_ratio: f64 = 0.0;
    let mut worst_gap: f64 = 0.0;
    for (ineq, beta, seed) in cases {
        let spec = PerturbationSpec::new(seed, 0.5, 4, 128, 128).map_err(err_str)?;
        let result = run_inequality_sweep(ineq, beta, 200, &spec).map_err(err_str)?;
        if !result.pass || result.violations != 0 {
            return Err(format!(
                "{} at beta = {beta}: violations = {}, worst ratio {} (seed {})",
                ineq.slug(),
                result.violations,
                result.worst_ratio,
                result.worst_seed
            ));
        }
        if result.equality_gap > 0.03 {
            return Err(format!(
                "{} at beta = {beta}: unperturbed extremal ratio off by {:.4}",
                ineq.slug(),
                result.equality_gap
            ));
        }
        worst_ratio = worst_ratio.max(result.worst_ratio);
        worst_gap = worst_gap.max(result.equality_gap);
    }
    let dt = t.elapsed();
    if dt >= Duration::from_secs(600) {
        return Err(format!("took {:.1} s (budget 600 s)", dt.as_secs_f64()));
    }
    Ok(format!(
        "1200 perturbed metrics, zero violations; worst ratio {worst_ratio:.4}, extremal \
         equality gap <= {worst_gap:.2e}; {:.1} s",
        dt.as_secs_f64()
    ))
}

// --------------------------------------------------------------------------
// 8. Asymptotics of the three constants.
// --------------------------------------------------------------------------
fn criterion_8() -> Result<String, String> {
    let t = Instant::now();
    let limit = c_of(Inequality::SigmaNV, 1e6)?.c;
    if (limit - 2.0).abs() > 1e-4 {
        return Err(format!("C(1e6) = {limit} is not within 1e-4 of 2"));
    }
    let probe = probe_asymptotics().map_err(err_str)?;
    if !probe.sigma_n_v_limit.monotone_increasing {
        return Err("non-vertical constant is not increasing along the log grid".into());
    }
    // Recompute the probe's explicit unboundedness witnesses through the
    // public constant evaluators.
    let c_v = c_of(Inequality::SigmaV, probe.sigma_v_unbounded.beta)?.c;
    let c_vh = c_of(Inequality::SigmaVH, probe.sigma_v_h_unbounded.beta)?.c;
    if c_v <= 100.0 || c_vh <= 100.0 {
        return Err(format!("unboundedness witnesses too small: {c_v}, {c_vh}"));
    }
    let dt = t.elapsed();
    if dt >= Duration::from_secs(1) {
        return Err(format!("took {:.2} s (budget 1 s)", dt.as_secs_f64()));
    }
    Ok(format!(
        "C_sigma_n_v(1e6) = 2 - {:.2e}, increasing; C_sigma_v({:.3e}) = {:.1} > 100; \
         C_sigma_v_h({:.3e}) = {:.1} > 100; {:.1} ms",
        2.0 - limit,
        probe.sigma_v_unbounded.beta,
        c_v,
        probe.sigma_v_h_unbounded.beta,
        c_vh,
        dt.as_secs_f64() * 1e3
    ))
}

// --------------------------------------------------------------------------
// 9. Monotonicity of the product constant in the cap angle.
// --------------------------------------------------------------------------
fn criterion_9() -> Result<String, String> {
    let probe = probe_asymptotics().map_err(err_str)?;
    let slope = &probe.product_slope;
    if !slope.stable_under_refinement {
        return Err("slope sign changes under step halving".into());
    }
    if slope.sign != -1 || !slope.derivatives.iter().all(|d| *d < 0.0) {
        return Err(format!("expected a negative slope throughout, got sign {}", slope.sign));
    }
    Ok(format!(
        "dC/domega < 0 at all {} probe angles (sign -1: the constant decreases in the cap \
         angle); stable under step halving",
        slope.omegas.len()
    ))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Result<String, String>); 9] = [
        ("isosystolic cross-check", criterion_1),
        ("threshold continuity", criterion_2),
        ("root residuals", criterion_3),
        ("algebraic identities", criterion_4),
        ("measure certificates", criterion_5),
        ("systole engine accuracy", criterion_6),
        ("inequality sweeps", criterion_7),
        ("corollary asymptotics", criterion_8),
        ("product-constant monotonicity", criterion_9),
    ];
    let mut failures = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => report(&format!("criterion {} PASS — {name}: {detail}", i + 1)),
            Err(detail) => {
                report(&format!("criterion {} FAIL — {name}: {detail}", i + 1));
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "acceptance criteria failed: {failures:?}");
}

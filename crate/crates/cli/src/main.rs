//! Command-line entry point: optimal systolic constants, extremal metrics,
//! grid systoles, measure certificates, Monte-Carlo inequality sweeps, and
//! asymptotic probes. Human-readable tables by default, `--json` for a
//! machine-readable envelope, CSV via `--out` where tabulation makes sense.
//!
//! Exit codes: 0 success, 1 numeric failure (solver/validity/violation),
//! 2 usage errors. Angles are radians; `beta` is the Klein-bottle conformal
//! type everywhere except the `mobius-*` families, where it is the Moebius
//! half-type. `KLEIN_SYSTOLIC_THREADS` caps internal worker threads.

use clap::{Parser, Subcommand};
use klein_systolic::measure::{certify_for_beta, ToleranceSpec};
use klein_systolic::systole::systole_report;
use klein_systolic::verification::{probe_asymptotics, run_inequality_sweep, PerturbationSpec};
use klein_systolic::{constants, extremal, io, solvers, HomotopyClass, Inequality};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "klein-systolic",
    version,
    about = "Optimal conformal systolic inequalities on the Klein bottle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_theorem(s: &str) -> Result<Inequality, String> {
    Inequality::from_slug(s).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once('x')
        .ok_or_else(|| format!("expected a resolution like 512x512, got {s}"))?;
    let n_u = a.trim().parse::<usize>().map_err(|e| e.to_string())?;
    let n_v = b.trim().parse::<usize>().map_err(|e| e.to_string())?;
    Ok((n_u, n_v))
}

#[derive(Clone)]
struct ClassSelection(Vec<HomotopyClass>);

fn parse_classes(s: &str) -> Result<ClassSelection, String> {
    match s {
        "all" => Ok(ClassSelection(vec![
            HomotopyClass::Sigma,
            HomotopyClass::Vertical,
            HomotopyClass::Horizontal,
        ])),
        other => {
            Ok(ClassSelection(vec![HomotopyClass::from_slug(other).map_err(|e| e.to_string())?]))
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimal constant of a theorem at one conformal type.
    Constants {
        /// sigma-v | sigma-n-v | sigma-v-h | mobius-sigma-v | mobius-sys-v
        #[arg(long, value_parser = parse_theorem)]
        theorem: Inequality,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        json: bool,
    },
    /// Tabulate the optimal constant over a range of conformal types.
    Sweep {
        #[arg(long, value_parser = parse_theorem)]
        theorem: Inequality,
        #[arg(long)]
        beta_min: f64,
        #[arg(long)]
        beta_max: f64,
        #[arg(long)]
        steps: usize,
        /// Write plot-ready CSV here instead of printing a table.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Solve one of the defining transcendental equations.
    Solve {
        /// b0 | omega-sigma-v | omega-sigma-v-h | b-sigma-n-v
        #[arg(long)]
        equation: String,
        /// Conformal type (required for every equation except b0).
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Construct the extremal metric for a theorem at one conformal type.
    Extremal {
        #[arg(long, value_parser = parse_theorem)]
        theorem: Inequality,
        #[arg(long)]
        beta: f64,
        /// Write the metric interchange JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Systole report (class lengths, volume) of a metric file.
    Systoles {
        /// Metric interchange JSON (profile or grid).
        #[arg(long)]
        metric: PathBuf,
        /// Grid resolution for graph-based lengths.
        #[arg(long, value_parser = parse_grid, default_value = "512x512")]
        grid: (usize, usize),
        /// sigma | v | h | all
        #[arg(long, value_parser = parse_classes, default_value = "all")]
        class: ClassSelection,
        #[arg(long)]
        json: bool,
    },
    /// Check the curve-measure certificate of an extremal bound.
    VerifyMeasure {
        #[arg(long, value_parser = parse_theorem)]
        theorem: Inequality,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol_push: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol_mass: f64,
        #[arg(long)]
        json: bool,
    },
    /// Monte-Carlo inequality check on random conformal perturbations.
    VerifyInequality {
        #[arg(long, value_parser = parse_theorem)]
        theorem: Inequality,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_parser = parse_grid, default_value = "128x128")]
        grid: (usize, usize),
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
        #[arg(long, default_value_t = 4)]
        modes: u32,
        #[arg(long)]
        json: bool,
    },
    /// Asymptotic and monotonicity probes of the optimal constants.
    Probe {
        /// Probe constant asymptotics (required; the only probe provided).
        #[arg(long)]
        asymptotics: bool,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli.command, started) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// Shortest exact decimal for a float (round-trips bit-exactly).
fn g(x: f64) -> String {
    format!("{x:?}")
}

fn g_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), g)
}

/// Print a line, exiting quietly if the consumer closed the pipe (e.g.
/// `... | head`).
fn print_line(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{s}").is_err() {
        std::process::exit(0);
    }
}

fn emit(json_mode: bool, command: &str, inputs: Value, outputs: Value, human: &str, started: Instant) {
    if json_mode {
        let envelope = json!({
            "command": command,
            "inputs": inputs,
            "outputs": outputs,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_ms": started.elapsed().as_secs_f64() * 1e3,
        });
        print_line(&serde_json::to_string_pretty(&envelope).expect("valid JSON"));
    } else {
        print_line(human);
    }
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("usage error: {message}");
    ExitCode::from(2)
}

fn run(command: Command, started: Instant) -> klein_systolic::Result<ExitCode> {
    match command {
        Command::Constants { theorem, beta, json } => {
            let result = constants::constant_for(theorem, beta)?;
            let human = format!(
                "theorem  beta  regime  C  omega  b\n{}  {}  {}  {}  {}  {}",
                theorem.slug(),
                g(result.beta),
                result.regime,
                g(result.c),
                g_opt(result.omega),
                g_opt(result.b),
            );
            emit(
                json,
                "constants",
                json!({"theorem": theorem.slug(), "beta": g(beta)}),
                serde_json::to_value(&result)?,
                &human,
                started,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { theorem, beta_min, beta_max, steps, out, json } => {
            let rows = constants::sweep(theorem, beta_min, beta_max, steps)?;
            let mut csv = String::from("# klein-systolic sweep v1\nbeta,regime,C,omega,b\n");
            for row in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    g(row.beta),
                    row.regime,
                    g(row.c),
                    row.omega.map_or_else(String::new, g),
                    row.b.map_or_else(String::new, g),
                ));
            }
            let inputs = json!({
                "theorem": theorem.slug(),
                "beta_min": g(beta_min),
                "beta_max": g(beta_max),
                "steps": steps,
            });
            if let Some(path) = &out {
                std::fs::write(path, &csv)?;
                let human = format!("wrote {} rows to {}", rows.len(), path.display());
                emit(
                    json,
                    "sweep",
                    inputs,
                    json!({"rows": rows.len(), "out": path.display().to_string()}),
                    &human,
                    started,
                );
            } else {
                // The CSV body doubles as the table.
                emit(json, "sweep", inputs, serde_json::to_value(&rows)?, csv.trim_end(), started);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve { equation, beta, json } => {
            let needs_beta = matches!(
                equation.as_str(),
                "omega-sigma-v" | "omega-sigma-v-h" | "b-sigma-n-v"
            );
            let solve = match equation.as_str() {
                "b0" => solvers::find_root(|x| x.tan() - 2.0 * x, 1.0, 1.5)?,
                "omega-sigma-v" => match beta {
                    Some(beta) => solvers::omega_from_beta_sigma_v(beta)?,
                    None => return Ok(usage_error("--beta is required for omega-sigma-v")),
                },
                "omega-sigma-v-h" => match beta {
                    Some(beta) => solvers::omega_from_beta_sigma_v_h(beta)?,
                    None => return Ok(usage_error("--beta is required for omega-sigma-v-h")),
                },
                "b-sigma-n-v" => match beta {
                    Some(beta) => {
                        let b = solvers::b_from_beta_sigma_n_v(beta)?;
                        // Closed form; the residual re-substitutes the
                        // defining relation beta(b) = threshold + 4(b - pi/3).
                        let threshold = 2.0 * (2.0 + 3.0f64.sqrt()).ln();
                        let residual =
                            (threshold + 4.0 * (b - std::f64::consts::FRAC_PI_3) - beta).abs();
                        solvers::RootSolve { root: b, residual, iterations: 0, bracket: (b, b) }
                    }
                    None => return Ok(usage_error("--beta is required for b-sigma-n-v")),
                },
                other => {
                    return Ok(usage_error(&format!(
                        "unknown equation {other}; expected b0 | omega-sigma-v | omega-sigma-v-h | b-sigma-n-v"
                    )))
                }
            };
            let human = format!(
                "equation  root  residual  iterations\n{}  {}  {}  {}",
                equation,
                g(solve.root),
                g(solve.residual),
                solve.iterations,
            );
            let mut inputs = json!({"equation": equation});
            if needs_beta {
                inputs["beta"] = Value::String(g(beta.expect("checked above")));
            }
            emit(json, "solve", inputs, serde_json::to_value(&solve)?, &human, started);
            Ok(ExitCode::SUCCESS)
        }
        Command::Extremal { theorem, beta, out, json } => {
            let (spec, metric) = extremal::extremal_for_beta(theorem, beta)?;
            let record = io::MetricRecord::from(&metric);
            if let Some(path) = &out {
                io::write_metric(path, &record)?;
            }
            let human = format!(
                "theorem  regime  beta  omega  b  volume\n{}  {}  {}  {}  {}  {}{}",
                spec.inequality.slug(),
                spec.regime,
                g(spec.beta),
                g_opt(spec.omega),
                g(spec.b),
                g(metric.volume()),
                out.as_ref()
                    .map_or_else(String::new, |p| format!("\nwrote metric to {}", p.display())),
            );
            let outputs = json!({
                "spec": serde_json::to_value(&spec)?,
                "volume": g(metric.volume()),
                "metric": serde_json::to_value(&record)?,
                "out": out.as_ref().map(|p| p.display().to_string()),
            });
            emit(
                json,
                "extremal",
                json!({"theorem": theorem.slug(), "beta": g(beta)}),
                outputs,
                &human,
                started,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Systoles { metric, grid, class, json } => {
            let m = io::read_metric(&metric)?;
            let report = systole_report(&m, grid.0, grid.1, &class.0)?;
            let human = format!(
                "l_sigma  l_v  l_h  L_sigma  volume\n{}  {}  {}  {}  {}",
                g_opt(report.l_sigma),
                g_opt(report.l_v),
                g_opt(report.l_h),
                g_opt(report.big_l_sigma),
                g(report.volume),
            );
            emit(
                json,
                "systoles",
                json!({
                    "metric": metric.display().to_string(),
                    "grid": format!("{}x{}", grid.0, grid.1),
                }),
                serde_json::to_value(&report)?,
                &human,
                started,
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyMeasure { theorem, beta, tol_push, tol_mass, json } => {
            let cert = certify_for_beta(theorem, beta, ToleranceSpec { tol_push, tol_mass })?;
            let mut human = format!(
                "theorem {}  beta {}  regime-2 parameters: omega {}  b {}  m' {}\n\
                 C {}  volume {}  p {}\n\
                 eps_mass {}  (tol {})\neps_push {}  (tol {})\nvalid {}\n\ngroups:",
                cert.inequality.slug(),
                g(cert.beta),
                g(cert.omega),
                g(cert.b),
                g(cert.m_prime),
                g(cert.c),
                g(cert.volume),
                cert.p,
                g(cert.eps_mass),
                g(cert.tol_mass),
                g(cert.eps_push),
                g(cert.tol_push),
                cert.valid,
            );
            for grp in &cert.groups {
                human.push_str(&format!(
                    "\n  {}  mass {}  length {}  mass*length {}",
                    grp.class,
                    g(grp.mass),
                    g(grp.length),
                    g(grp.weighted),
                ));
            }
            human.push_str("\n\npushforward residuals:");
            for r in &cert.push_residuals {
                human.push_str(&format!("\n  {}  {}", r.name, g(r.residual)));
            }
            let valid = cert.valid;
            emit(
                json,
                "verify-measure",
                json!({
                    "theorem": theorem.slug(),
                    "beta": g(beta),
                    "tol_push": g(tol_push),
                    "tol_mass": g(tol_mass),
                }),
                serde_json::to_value(&cert)?,
                &human,
                started,
            );
            Ok(if valid { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::VerifyInequality { theorem, beta, samples, seed, grid, amplitude, modes, json } => {
            let spec = PerturbationSpec::new(seed, amplitude, modes, grid.0, grid.1)?;
            let result = run_inequality_sweep(theorem, beta, samples, &spec)?;
            let human = format!(
                "theorem {}  beta {}  samples {}  grid {}x{}  amplitude {}  seed {}\n\
                 C {}  worst ratio {} (seed {})  equality gap {}\n\
                 violations {}{}\npass {}",
                result.inequality.slug(),
                g(result.beta),
                result.samples,
                result.n_u,
                result.n_v,
                g(result.amplitude),
                result.base_seed,
                g(result.c),
                g(result.worst_ratio),
                result.worst_seed,
                g(result.equality_gap),
                result.violations,
                result
                    .failing_seed
                    .map_or_else(String::new, |s| format!("  (first failing seed {s})")),
                result.pass,
            );
            let pass = result.pass;
            emit(
                json,
                "verify-inequality",
                json!({
                    "theorem": theorem.slug(),
                    "beta": g(beta),
                    "samples": samples,
                    "seed": seed,
                    "grid": format!("{}x{}", grid.0, grid.1),
                    "amplitude": g(amplitude),
                    "modes": modes,
                }),
                serde_json::to_value(&result)?,
                &human,
                started,
            );
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Probe { asymptotics, json } => {
            if !asymptotics {
                return Ok(usage_error("probe requires --asymptotics"));
            }
            let report = probe_asymptotics()?;
            let human = format!(
                "sigma-v unbounded: C({}) = {}\n\
                 sigma-n-v limit: monotone {}  2 - C(1e6) = {}\n\
                 sigma-v-h unbounded: C({}) = {}\n\
                 sigma-v-h slope in omega: sign {}  stable {}\npass {}",
                g(report.sigma_v_unbounded.beta),
                g(report.sigma_v_unbounded.c),
                report.sigma_n_v_limit.monotone_increasing,
                g(report.sigma_n_v_limit.limit_gap),
                g(report.sigma_v_h_unbounded.beta),
                g(report.sigma_v_h_unbounded.c),
                report.product_slope.sign,
                report.product_slope.stable_under_refinement,
                report.pass,
            );
            let pass = report.pass;
            emit(
                json,
                "probe",
                json!({"asymptotics": true}),
                serde_json::to_value(&report)?,
                &human,
                started,
            );
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use angular_billiard::angular::{self, AngularError, AngularState};
use angular_billiard::birkhoff::{
    billiard_orbit, eval_integral, BilliardLineState, BirkhoffTable, IntegralPoly,
};
use angular_billiard::bridge::{dualize_integral, orbit_correspondence_deviation};
use angular_billiard::curve::{BuiltCurve, CurveSpec, SupportCurve};
use angular_billiard::integrability::{
    certify, e4_constancy_check, lemma_e1_residual, mu_series_residual, remarkable_identity,
    IntegralData,
};
use angular_billiard::io::{
    certificate_to_json, poly_from_json, write_angular_orbit_csv, write_birkhoff_orbit_csv,
    IntegralSpec,
};
use angular_billiard::normal_form::{
    coeff_a, coeff_b, lazutkin_step_check, twist_profile, z_expansion_slope,
};
use angular_billiard::render::{
    curve_overlay, p_curve_overlays, parse_orbit_csv, render_svg, s_curve_overlays,
};
use angular_billiard::trace::trace_curve;
use angular_billiard::OrientedLine;

/// Angular billiard dynamics, duality with the Birkhoff billiard, and
/// algebraic non-integrability certificates.
#[derive(Parser)]
#[command(name = "angular-billiard", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Angular,
    Birkhoff,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate an orbit and export it as CSV.
    Orbit {
        #[arg(long, value_enum)]
        system: System,
        /// Curve JSON (inline or a file path).
        #[arg(long)]
        curve: String,
        /// Start state "phi,r" (angular exterior point) or "phi,p" (oriented line).
        #[arg(long)]
        start: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Optional integral JSON for the birkhoff integral_value column.
        #[arg(long)]
        integral: Option<String>,
    },
    /// Compare dualized Birkhoff orbits against angular orbits pointwise.
    DualCheck {
        #[arg(long)]
        curve: String,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Report the minimum twist of the generating function over a grid.
    Twist {
        #[arg(long)]
        curve: String,
    },
    /// Report the drift of a candidate integral along billiard orbits.
    IntegralCheck {
        #[arg(long)]
        curve: String,
        #[arg(long)]
        integral: String,
        #[arg(long, default_value_t = 500)]
        steps: usize,
    },
    /// Check the on-curve algebraic identities for F₁ = fᵏg₁.
    Identity {
        /// Polynomial f as [[i, j, c], ...] (inline or file).
        #[arg(long)]
        f: String,
        /// Polynomial g₁ as [[i, j, c], ...] (inline or file).
        #[arg(long)]
        g1: String,
        #[arg(long)]
        k: u32,
        /// Half-degree p of the homogenized integral.
        #[arg(long)]
        p: f64,
    },
    /// Emit a non-integrability certificate for the curve {f = 0} as JSON.
    Certify {
        #[arg(long)]
        f: String,
    },
    /// Report the Lazutkin expansion coefficients and decay orders.
    Normalform {
        #[arg(long)]
        curve: String,
    },
    /// Render an orbit CSV as a static SVG phase portrait.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Optional curve JSON to overlay the curve and its S/P curves.
        #[arg(long)]
        curve: Option<String>,
    },
}

struct StageError {
    stage: &'static str,
    message: String,
}

type CliResult = Result<(), StageError>;

fn fail<E: std::fmt::Display>(stage: &'static str) -> impl FnOnce(E) -> StageError {
    move |e| StageError {
        stage,
        message: e.to_string(),
    }
}

/// Inline JSON if the argument starts with a JSON delimiter, else file contents.
fn load_json_arg(arg: &str, stage: &'static str) -> Result<String, StageError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| StageError {
            stage,
            message: format!("cannot read {arg}: {e}"),
        })
    }
}

fn load_support_curve(arg: &str, stage: &'static str) -> Result<SupportCurve, StageError> {
    let json = load_json_arg(arg, stage)?;
    CurveSpec::from_json(&json)
        .and_then(|s| s.build_support())
        .map_err(fail(stage))
}

fn load_integral(arg: &str, stage: &'static str) -> Result<IntegralPoly, StageError> {
    let json = load_json_arg(arg, stage)?;
    IntegralSpec::from_json(&json)
        .and_then(|s| s.build())
        .map_err(fail(stage))
}

fn parse_pair(arg: &str, stage: &'static str) -> Result<(f64, f64), StageError> {
    let parts: Vec<&str> = arg.split(',').collect();
    let parse = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| StageError {
            stage,
            message: format!("bad start parameter {s:?}; expected two floats \"a,b\""),
        })
    };
    match parts.as_slice() {
        [a, b] => Ok((parse(a)?, parse(b)?)),
        _ => Err(StageError {
            stage,
            message: format!("bad start {arg:?}; expected two floats \"a,b\""),
        }),
    }
}

/// Names the error variant so failures like SCurveSingularity are explicit.
fn angular_error_name(e: &AngularError) -> String {
    match e {
        AngularError::InteriorPoint { .. } => "InteriorPoint".into(),
        AngularError::SCurveSingularity { .. } => "SCurveSingularity".into(),
        AngularError::TangencySolve(_) => "TangencySolve".into(),
        AngularError::AtStep { index, source } => {
            format!("{} at step {index}", angular_error_name(source))
        }
    }
}

fn cmd_orbit(
    system: System,
    curve: &str,
    start: &str,
    steps: usize,
    out: &PathBuf,
    integral: Option<&str>,
) -> CliResult {
    let gamma = load_support_curve(curve, "orbit")?;
    let (a, b) = parse_pair(start, "orbit")?;
    let mut buf = Vec::new();
    match system {
        System::Angular => {
            let (states, diags) =
                angular::orbit(&gamma, AngularState::new(a, b), steps).map_err(|e| StageError {
                    stage: "orbit",
                    message: format!("{}: {e}", angular_error_name(&e)),
                })?;
            write_angular_orbit_csv(&mut buf, &states, &diags).map_err(fail("orbit"))?;
        }
        System::Birkhoff => {
            let table = BirkhoffTable::from_dual(gamma);
            let phi = integral
                .map(|arg| load_integral(arg, "orbit"))
                .transpose()?;
            let start_state = BilliardLineState::new(OrientedLine::new(a, b));
            let states = billiard_orbit(&table, start_state, steps).map_err(fail("orbit"))?;
            write_birkhoff_orbit_csv(&mut buf, &table, &states, phi.as_ref())
                .map_err(fail("orbit"))?;
        }
    }
    fs::write(out, buf).map_err(fail("orbit"))?;
    println!("wrote {} steps to {}", steps, out.display());
    Ok(())
}

/// Starting chords for duality/drift checks: near-tangent lines of the dual
/// table at a spread of normal angles, plus one reversed (negative) line.
fn check_chords(table: &BirkhoffTable, count: usize) -> Vec<BilliardLineState> {
    let mut chords = Vec::new();
    for k in 0..count {
        let phi = std::f64::consts::TAU * k as f64 / count as f64 + 0.1;
        let line = OrientedLine::new(phi, 0.9 * table.support(phi));
        chords.push(BilliardLineState::new(line));
    }
    chords.push(chords[0].reversed());
    chords
}

fn cmd_dual_check(curve: &str, steps: usize) -> CliResult {
    let gamma = load_support_curve(curve, "dual-check")?;
    let table = BirkhoffTable::from_dual(gamma);
    let mut worst = 0.0f64;
    for chord in check_chords(&table, 8) {
        worst = worst.max(
            orbit_correspondence_deviation(&table, chord, steps).map_err(fail("dual-check"))?,
        );
    }
    println!("max orbit deviation over {steps} steps: {worst:.3e}");
    Ok(())
}

fn cmd_twist(curve: &str) -> CliResult {
    let gamma = load_support_curve(curve, "twist")?;
    let min = twist_profile(&gamma, 256, 128, 1e-3);
    println!("min twist over grid: {min:.6e}");
    if min <= 0.0 {
        return Err(StageError {
            stage: "twist",
            message: format!("twist is not positive: minimum {min:e}"),
        });
    }
    Ok(())
}

fn cmd_integral_check(curve: &str, integral: &str, steps: usize) -> CliResult {
    let gamma = load_support_curve(curve, "integral-check")?;
    let phi = load_integral(integral, "integral-check")?;
    let table = BirkhoffTable::from_dual(gamma);
    let mut drift = 0.0f64;
    for chord in check_chords(&table, 8) {
        let states =
            billiard_orbit(&table, chord, steps).map_err(fail("integral-check"))?;
        let v0 = eval_integral(&phi, &states[0].line);
        for s in &states {
            drift = drift.max((eval_integral(&phi, &s.line) - v0).abs() / (1.0 + v0.abs()));
        }
    }
    println!("birkhoff drift over {steps} steps: {drift:.3e}");
    let dual = dualize_integral(&phi).map_err(fail("integral-check"))?;
    let mut dual_drift = 0.0f64;
    for chord in check_chords(&table, 8) {
        if chord.line.p() <= 0.0 {
            continue;
        }
        let states = billiard_orbit(&table, chord, steps).map_err(fail("integral-check"))?;
        let duals =
            angular_billiard::bridge::dualize_orbit(&states).map_err(fail("integral-check"))?;
        let g0 = dual.eval(duals[0].0.x, duals[0].0.y);
        for (q, _) in &duals {
            dual_drift = dual_drift.max((dual.eval(q.x, q.y) - g0).abs() / (1.0 + g0.abs()));
        }
    }
    println!("dual integral drift over {steps} steps: {dual_drift:.3e}");
    Ok(())
}

fn cmd_identity(f: &str, g1: &str, k: u32, p: f64) -> CliResult {
    let stage = "identity";
    let f = poly_from_json(&load_json_arg(f, stage)?).map_err(fail(stage))?;
    let g1 = poly_from_json(&load_json_arg(g1, stage)?).map_err(fail(stage))?;
    let model = angular_billiard::curve::ImplicitCurveModel::from_poly_autoseed(f.clone())
        .map_err(fail(stage))?;
    let trace = trace_curve(&model, 0.01).map_err(fail(stage))?;
    let data = IntegralData {
        f,
        g1,
        k,
        p_half: p,
    };
    let (c1, spread1) = remarkable_identity(&data, &trace).map_err(fail(stage))?;
    println!("(e2) c1 = {c1:.12e}, relative spread = {spread1:.3e}");
    let (c, spread4) = e4_constancy_check(&data, &trace).map_err(fail(stage))?;
    println!("(e4) c  = {c:.12e}, relative spread = {spread4:.3e}");
    let mut e1_worst = 0.0f64;
    let stride = (trace.points.len() / 64).max(1);
    for q in trace.points.iter().step_by(stride) {
        e1_worst = e1_worst.max(
            lemma_e1_residual(&data, q.x, q.y, 1e-3).map_err(fail(stage))?,
        );
    }
    println!("(e1) max residual at eps=1e-3: {e1_worst:.3e}");
    // a probe point off the axes, where the series has nonzero tail terms
    let q = trace
        .points
        .iter()
        .max_by(|a, b| (a.x * a.y).abs().total_cmp(&(b.x * b.y).abs()))
        .expect("trace is nonempty");
    let r_full = mu_series_residual(&data, q.x, q.y, 1e-2, 6).map_err(fail(stage))?;
    let r_half = mu_series_residual(&data, q.x, q.y, 5e-3, 6).map_err(fail(stage))?;
    println!(
        "mu-series truncation residual ratio (eps 1e-2 / 5e-3): {:.1} (order-7 target 128)",
        r_full / r_half
    );
    Ok(())
}

fn cmd_certify(f: &str) -> CliResult {
    let stage = "certify";
    let f = poly_from_json(&load_json_arg(f, stage)?).map_err(fail(stage))?;
    let model = angular_billiard::curve::ImplicitCurveModel::from_poly_autoseed(f.clone());
    // a singular start point still yields a certificate via the fallback trace
    let trace = match model {
        Ok(m) => trace_curve(&m, 0.01).map_err(fail(stage))?,
        Err(e) => return Err(fail(stage)(e)),
    };
    let cert = certify(&f, &trace).map_err(fail(stage))?;
    // tolerate a closed pipe on the JSON stream
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{}", certificate_to_json(&cert));
    Ok(())
}

fn cmd_normalform(curve: &str) -> CliResult {
    let gamma = load_support_curve(curve, "normalform")?;
    println!("phi, A = (p'' + p)/2, B = 2A'/3");
    for k in 0..16 {
        let phi = std::f64::consts::TAU * k as f64 / 16.0;
        println!(
            "{phi:.6}, {:.12e}, {:.12e}",
            coeff_a(&gamma, phi),
            coeff_b(&gamma, phi)
        );
    }
    let mut min_slope = f64::INFINITY;
    for k in 0..8 {
        let phi = std::f64::consts::TAU * k as f64 / 8.0 + 0.05;
        min_slope = min_slope.min(z_expansion_slope(&gamma, phi));
    }
    println!("z-expansion residual decay order (target >= 3.9): {min_slope:.3}");
    let (r1a, r2a) = lazutkin_step_check(&gamma, 0.7, 0.05).map_err(fail("normalform"))?;
    let (r1b, r2b) = lazutkin_step_check(&gamma, 0.7, 0.025).map_err(fail("normalform"))?;
    println!(
        "step residual ratios v=0.05 vs 0.025: order-2 term {:.2} (>= 3.5), order-3 term {:.2} (>= 7)",
        r1a / r1b,
        r2a / r2b
    );
    Ok(())
}

fn cmd_render(input: &PathBuf, out: &PathBuf, curve: Option<&str>) -> CliResult {
    let stage = "render";
    let text = fs::read_to_string(input).map_err(|e| StageError {
        stage,
        message: format!("cannot read {}: {e}", input.display()),
    })?;
    let points = parse_orbit_csv(&text).map_err(fail(stage))?;
    let mut overlays = Vec::new();
    if let Some(arg) = curve {
        let json = load_json_arg(arg, stage)?;
        let spec = CurveSpec::from_json(&json).map_err(fail(stage))?;
        match spec.build().map_err(fail(stage))? {
            BuiltCurve::Support(gamma) => {
                let max_norm = 10.0
                    * points
                        .iter()
                        .map(|&(x, y)| x.hypot(y))
                        .fold(1.0, f64::max);
                overlays.push(curve_overlay(&gamma, 512));
                overlays.extend(s_curve_overlays(&gamma, 1024, max_norm));
                overlays.extend(p_curve_overlays(&gamma, 1024, max_norm));
            }
            BuiltCurve::Implicit(model) => {
                let trace = trace_curve(&model, 0.01).map_err(fail(stage))?;
                overlays.push(angular_billiard::render::Overlay {
                    points: trace.points.iter().map(|q| (q.x, q.y)).collect(),
                    stroke: "#1f4e79",
                    closed: trace.closed,
                });
            }
        }
    }
    let svg = render_svg(&points, &overlays).map_err(fail(stage))?;
    fs::write(out, svg).map_err(fail(stage))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Orbit {
            system,
            curve,
            start,
            steps,
            out,
            integral,
        } => cmd_orbit(*system, curve, start, *steps, out, integral.as_deref()),
        Command::DualCheck { curve, steps } => cmd_dual_check(curve, *steps),
        Command::Twist { curve } => cmd_twist(curve),
        Command::IntegralCheck {
            curve,
            integral,
            steps,
        } => cmd_integral_check(curve, integral, *steps),
        Command::Identity { f, g1, k, p } => cmd_identity(f, g1, *k, *p),
        Command::Certify { f } => cmd_certify(f),
        Command::Normalform { curve } => cmd_normalform(curve),
        Command::Render { input, out, curve } => cmd_render(input, out, curve.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error in {}: {}", e.stage, e.message);
            ExitCode::FAILURE
        }
    }
}

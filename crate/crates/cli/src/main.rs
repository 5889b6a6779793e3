//! `zakfrft`: batch front end. Exit codes: 0 all reports pass, 1 a tolerance
//! failed, 2 invalid input, 3 I/O failure.

mod shapes;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use zakfrft::approx::{build_solution_with, evaluate_modulus, monotonicity_report, solution_reports, ApproxSpec};
use zakfrft::chirp::gauss_coefficient;
use zakfrft::counterexample::{
    build_family, correlation, verify_disjoint_supports, verify_phase_invariance, FamilyConfig,
};
use zakfrft::frft::{FrftConvention, FrftOperator};
use zakfrft::oblique::{oblique_pair, oblique_report, MomentVariant};
use zakfrft::selftest::run_selftest;
use zakfrft::zak::{verify_zak_identities, zak_eval, ZakCheckSpec};
use zakfrft::{Error, Grid, QuadratureSpec, RationalSlope, ReportBundle, SampledTrace, Tolerances, VerificationReport};

use shapes::{parse_list, parse_range, parse_real, parse_shape, Shape};

#[derive(Parser, Serialize)]
#[command(name = "zakfrft", version, about = "Fractional Fourier / Zak transform verification suite")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// JSON file overriding any subset of the tolerance registry.
    #[arg(long, global = true)]
    tol_file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct Output {
    /// Directory for artifacts; without it the primary output goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Fractional Fourier transform of a built-in signal, as CSV `t,re,im`.
    Frft {
        /// Shape spec such as `gaussian`, `box:-1:1`, `raised-cosine:0:1:6`.
        #[arg(long, default_value = "gaussian")]
        signal: String,
        /// Angle in radians; `pi/3` style accepted.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value = "-4:4:161", allow_hyphen_values = true)]
        xi_range: String,
        #[arg(long, default_value = "paper")]
        convention: String,
        #[command(flatten)]
        output: Output,
    },
    /// Zak transform on the unit square, CSV `x,xi,re,im`, plus identity reports.
    Zak {
        #[arg(long, default_value = "gaussian")]
        signal: String,
        /// `MxL`: M points in x and L points in xi, both on [0, 1).
        #[arg(long, default_value = "16x16")]
        grid: String,
        #[command(flatten)]
        output: Output,
    },
    /// Gauss-sum coefficients `c_{n,p,q}`, CSV `n,re,im,abs`.
    Coeffs {
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long)]
        q: i64,
        /// `a:b` inclusive; defaults to one period `0:q-1`.
        #[arg(long, allow_hyphen_values = true)]
        n_range: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Oblique Zak-line formula against direct quadrature.
    ObliqueCheck {
        #[arg(long, allow_negative_numbers = true)]
        p: i64,
        #[arg(long)]
        q: i64,
        #[arg(long, default_value = "gaussian")]
        signal: String,
        #[arg(long, default_value = "-3:3:121", allow_hyphen_values = true)]
        xi_range: String,
        /// Overrides the registry's oblique tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Families with equal fractional Fourier moduli at every given slope.
    Counterexample {
        /// Slopes `p/q`, comma separated.
        #[arg(long, default_value = "1/1,2/1,1/2", allow_hyphen_values = true)]
        angles: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.06)]
        width: f64,
        #[arg(long, default_value_t = 0.01)]
        margin: f64,
        /// Phase angles, comma separated, `pi/3` style accepted; default alternates 0, pi.
        #[arg(long, allow_hyphen_values = true)]
        phases: Option<String>,
        #[arg(long, default_value = "-1:1:801", allow_hyphen_values = true)]
        xi_range: String,
        /// Overrides the registry's leakage tolerance.
        #[arg(long)]
        leak_tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Signal whose moduli approximate prescribed targets at several angles.
    ApproxPauli {
        /// JSON list of shapes, e.g. `[{"shape": "triangle"}, {"shape": "box", "a": -1, "b": 1}]`.
        #[arg(long)]
        targets: PathBuf,
        /// Angles in radians, comma separated, `pi/2` style accepted.
        #[arg(long, allow_hyphen_values = true)]
        angles: String,
        /// Overrides the registry's epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long = "T", default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 64.0)]
        scan_range: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Runs the full acceptance suite.
    Selftest {
        #[command(flatten)]
        output: Output,
    },
}

enum Failure {
    Input(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// What a subcommand produced. `files` are relative to the output directory.
#[derive(Default)]
struct Outcome {
    files: Vec<(String, String)>,
    bundle: ReportBundle,
    stdout: String,
}

/// Errors that mean "the numbers missed", not "the request was malformed".
fn tolerance_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::TailTooLarge { .. } | Error::LevelUnattained { .. } | Error::EpsilonNotAchieved { .. }
    )
}

fn failed_build(check: &str, e: &Error) -> Outcome {
    let bundle = ReportBundle::new(vec![VerificationReport::audit(check, false).with("error", e.to_string())]);
    Outcome {
        stdout: bundle.to_json() + "\n",
        bundle,
        ..Outcome::default()
    }
}

fn grid_from(text: &str) -> Result<Grid, Failure> {
    let (a, b, n) = parse_range(text)?;
    Ok(Grid::linspace(a, b, n)?)
}

fn slope_from(p: i64, q: i64) -> Result<RationalSlope, Failure> {
    Ok(RationalSlope::new(p, q)?)
}

fn run_frft(signal: &str, alpha: &str, xi_range: &str, convention: &str) -> Result<Outcome, Failure> {
    let f = parse_shape(signal)?.signal()?;
    let alpha = parse_real(alpha)?;
    let conv: FrftConvention = convention.parse()?;
    let grid = grid_from(xi_range)?;
    let op = FrftOperator::new(&f, alpha, conv, &QuadratureSpec::default())?;
    let trace = SampledTrace::tabulate(&grid, |xi| op.eval(xi));
    let csv = trace.to_csv_string();
    Ok(Outcome {
        files: vec![("frft.csv".into(), csv.clone())],
        stdout: csv,
        ..Outcome::default()
    })
}

fn run_zak(signal: &str, grid: &str, tol: &Tolerances) -> Result<Outcome, Failure> {
    let f = parse_shape(signal)?.signal()?;
    let (m, l) = grid
        .split_once('x')
        .and_then(|(m, l)| Some((m.parse::<usize>().ok()?, l.parse::<usize>().ok()?)))
        .filter(|&(m, l)| m > 0 && l > 0)
        .ok_or_else(|| Failure::Input(format!("grid {grid:?} is not MxL with positive integers")))?;
    let mut csv = String::from("x,xi,re,im\n");
    for i in 0..m {
        let x = i as f64 / m as f64;
        for j in 0..l {
            let xi = j as f64 / l as f64;
            let z = zak_eval(&f, x, xi)?;
            writeln!(csv, "{x:.16e},{xi:.16e},{:.16e},{:.16e}", z.re, z.im).expect("string write");
        }
    }
    let spec = ZakCheckSpec {
        tol: tol.zak,
        ..ZakCheckSpec::default()
    };
    let bundle = ReportBundle::new(verify_zak_identities(&f, &spec)?);
    Ok(Outcome {
        files: vec![("zak.csv".into(), csv.clone())],
        bundle,
        stdout: csv,
    })
}

fn run_coeffs(p: i64, q: i64, n_range: Option<&str>) -> Result<Outcome, Failure> {
    let slope = slope_from(p, q)?;
    let (a, b) = match n_range {
        None => (0, q - 1),
        Some(text) => {
            let parsed = text
                .split_once(':')
                .and_then(|(a, b)| Some((a.parse::<i64>().ok()?, b.parse::<i64>().ok()?)));
            match parsed {
                Some((a, b)) if a <= b => (a, b),
                _ => return Err(Failure::Input(format!("n-range {text:?} is not a:b with a <= b"))),
            }
        }
    };
    let mut csv = String::from("n,re,im,abs\n");
    for n in a..=b {
        let c = gauss_coefficient(n, slope);
        writeln!(csv, "{n},{:.16e},{:.16e},{:.16e}", c.re, c.im, c.norm()).expect("string write");
    }
    Ok(Outcome {
        files: vec![("coeffs.csv".into(), csv.clone())],
        stdout: csv,
        ..Outcome::default()
    })
}

fn run_oblique(p: i64, q: i64, signal: &str, xi_range: &str, tol: f64) -> Result<Outcome, Failure> {
    let slope = slope_from(p, q)?;
    let f = parse_shape(signal)?.signal()?;
    let grid = grid_from(xi_range)?;
    let variant = MomentVariant::default();
    let (direct, oblique) = oblique_pair(&f, slope, &grid, variant)?;
    let report = oblique_report(&f, slope, &direct, &oblique, tol, variant)?;
    let mut csv = String::from("xi,direct_re,direct_im,oblique_re,oblique_im\n");
    for ((xi, d), o) in direct.iter().zip(oblique.values()) {
        writeln!(csv, "{xi:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", d.re, d.im, o.re, o.im).expect("string write");
    }
    let bundle = ReportBundle::new(vec![report]);
    Ok(Outcome {
        files: vec![("oblique.csv".into(), csv)],
        stdout: bundle.to_json() + "\n",
        bundle,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_counterexample(
    angles: &str,
    n: usize,
    width: f64,
    margin: f64,
    phases: Option<&str>,
    xi_range: &str,
    leak_tol: f64,
    tol: &Tolerances,
) -> Result<Outcome, Failure> {
    let slopes = parse_list(angles, |s| s.parse::<RationalSlope>())?;
    let phases: Vec<Complex64> = match phases {
        Some(text) => parse_list(text, parse_real)?.into_iter().map(|t| Complex64::from_polar(1.0, t)).collect(),
        None => (0..n).map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect(),
    };
    if phases.len() != n {
        return Err(Failure::Input(format!("{} phases given for n = {n}", phases.len())));
    }
    let grid = grid_from(xi_range)?;
    let mut config = FamilyConfig::new(slopes, n);
    config.width = width;
    config.margin = margin;
    let family = match build_family(&config) {
        Ok(f) => f,
        Err(e) if tolerance_failure(&e) => return Ok(failed_build("counterexample.build", &e)),
        Err(e) => return Err(e.into()),
    };
    let traces = family.traces(&grid)?;
    let mut reports = verify_disjoint_supports(&family, &traces, &grid, leak_tol);
    reports.extend(verify_phase_invariance(
        &family,
        &traces,
        &phases,
        tol.phase_invariance,
        tol.correlation_max,
    )?);

    let mut files = Vec::new();
    for (j, slope) in family.config.slopes.iter().enumerate() {
        let tag = format!("{}_{}", slope.p(), slope.q());
        for (k, t) in traces.traces[j].iter().enumerate() {
            files.push((format!("traces/f{k}_slope{tag}.csv"), t.to_csv_string()));
        }
        let ones = vec![Complex64::new(1.0, 0.0); n];
        files.push((format!("traces/plain_slope{tag}.csv"), traces.combination(j, &ones).to_csv_string()));
        files.push((format!("traces/phased_slope{tag}.csv"), traces.combination(j, &phases).to_csv_string()));
    }
    let (lo, hi) = (grid.start, grid.end());
    let supports: Vec<Value> = family
        .supports
        .iter()
        .map(|row| {
            json!({
                "slope": row[0].slope.to_string(),
                "sin_alpha": row[0].sin_alpha,
                "xi_window": [lo, hi],
                "signals": row.iter().map(|s| json!({
                    "heights": s.heights.arcs(),
                    "period": s.period(),
                    "xi_intervals": s.intervals_in(lo, hi),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut meta = family.metadata();
    meta["phases"] = json!(phases.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>());
    meta["correlation"] = json!(correlation(&family, &phases)?);
    files.push(("family.json".into(), pretty(&meta)));
    files.push(("supports.json".into(), pretty(&json!(supports))));
    let bundle = ReportBundle::new(reports);
    Ok(Outcome {
        files,
        stdout: bundle.to_json() + "\n",
        bundle,
    })
}

fn run_approx(targets: &Path, angles: &str, epsilon: f64, t: f64, scan_range: f64) -> Result<Outcome, Failure> {
    let text = std::fs::read_to_string(targets).map_err(|e| io_err(targets, e))?;
    let shapes: Vec<Shape> =
        serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", targets.display())))?;
    let targets = shapes.iter().map(Shape::signal).collect::<Result<Vec<_>, _>>()?;
    let angles = parse_list(angles, parse_real)?;
    let spec = ApproxSpec {
        scan_range,
        ..ApproxSpec::default()
    };
    let sol = match build_solution_with(&targets, &angles, epsilon, t, &spec) {
        Ok(s) => s,
        Err(e) if tolerance_failure(&e) => return Ok(failed_build("approx.build", &e)),
        Err(e) => return Err(e.into()),
    };
    let mut reports = solution_reports(&sol);
    reports.push(monotonicity_report(&sol, 2.0)?);
    let ones = vec![Complex64::new(1.0, 0.0); sol.components.len()];
    let mut files = Vec::new();
    for (k, c) in sol.components.iter().enumerate() {
        let m = evaluate_modulus(&sol, &ones, c.angle, &sol.grid)?;
        files.push((format!("modulus_{k}.csv"), m.to_csv_string()));
    }
    let record = json!({
        "epsilon": sol.epsilon,
        "T": sol.t,
        "spec": sol.spec,
        "grid": sol.grid,
        "components": sol.components.iter().map(|c| json!({
            "target": c.target.to_string(),
            "angle": c.angle,
            "omega": c.omega,
            "threshold": c.threshold,
        })).collect::<Vec<_>>(),
        "achieved": sol.achieved,
        "cross": sol.cross,
    });
    files.push(("solution.json".into(), pretty(&record)));
    let bundle = ReportBundle::new(reports);
    Ok(Outcome {
        files,
        stdout: bundle.to_json() + "\n",
        bundle,
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn load_tolerances(path: Option<&Path>) -> Result<Tolerances, Failure> {
    match path {
        None => Ok(Tolerances::default()),
        Some(p) => Ok(Tolerances::load(p).map_err(|e| io_err(p, e))??),
    }
}

fn execute(cli: &Cli, tol: &Tolerances) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Frft {
            signal,
            alpha,
            xi_range,
            convention,
            ..
        } => run_frft(signal, alpha, xi_range, convention),
        Command::Zak { signal, grid, .. } => run_zak(signal, grid, tol),
        Command::Coeffs { p, q, n_range, .. } => run_coeffs(*p, *q, n_range.as_deref()),
        Command::ObliqueCheck {
            p,
            q,
            signal,
            xi_range,
            tol: t,
            ..
        } => run_oblique(*p, *q, signal, xi_range, t.unwrap_or(tol.oblique)),
        Command::Counterexample {
            angles,
            n,
            width,
            margin,
            phases,
            xi_range,
            leak_tol,
            ..
        } => run_counterexample(
            angles,
            *n,
            *width,
            *margin,
            phases.as_deref(),
            xi_range,
            leak_tol.unwrap_or(tol.leak),
            tol,
        ),
        Command::ApproxPauli {
            targets,
            angles,
            epsilon,
            t,
            scan_range,
            ..
        } => run_approx(targets, angles, epsilon.unwrap_or(tol.approx_epsilon), *t, *scan_range),
        Command::Selftest { .. } => {
            let bundle = run_selftest(tol);
            Ok(Outcome {
                stdout: bundle.to_json() + "\n",
                bundle,
                ..Outcome::default()
            })
        }
    }
}

fn out_dir(cmd: &Command) -> Option<&Path> {
    let o = match cmd {
        Command::Frft { output, .. }
        | Command::Zak { output, .. }
        | Command::Coeffs { output, .. }
        | Command::ObliqueCheck { output, .. }
        | Command::Counterexample { output, .. }
        | Command::ApproxPauli { output, .. }
        | Command::Selftest { output } => output,
    };
    o.out.as_deref()
}

/// Writes artifacts, the resolved config and `reports.json`; returns the paths written.
fn emit(dir: &Path, cli: &Cli, tol: &Tolerances, outcome: &Outcome) -> Result<Vec<PathBuf>, Failure> {
    let config = json!({ "command": cli.command, "tol_file": cli.tol_file, "tolerances": tol });
    let mut all = vec![("config.json".to_string(), pretty(&config))];
    all.extend(outcome.files.iter().cloned());
    all.push(("reports.json".into(), outcome.bundle.to_json() + "\n"));
    let mut written = Vec::new();
    for (name, content) in all {
        let path = dir.join(&name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        std::fs::write(&path, content).map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            return ExitCode::from(if informational { 0 } else { 2 });
        }
    };
    let result = load_tolerances(cli.tol_file.as_deref()).and_then(|tol| {
        // fail on an unusable directory before any computation
        if let Some(dir) = out_dir(&cli.command) {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let outcome = execute(&cli, &tol)?;
        match out_dir(&cli.command) {
            Some(dir) => {
                emit(dir, &cli, &tol, &outcome)?;
            }
            None => print!("{}", outcome.stdout),
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for r in outcome.bundle.reports.iter().filter(|r| !r.pass) {
                eprintln!("FAIL {}: {:e} > {:e} {}", r.check, r.max_error, r.tolerance, json!(r.metadata));
            }
            ExitCode::from(if outcome.bundle.all_pass() { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(3)
        }
    }
}

//! `l2plus` command-line front end.
//!
//! Exit codes: 0 success, 1 domain error (bad system file, not Hurwitz, failed
//! solve, failed reproduction check), 2 usage error.

mod reproduce;

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use l2plus::bounds::{
    certify_small_gain_with, solve_cell_with, sweep_with, BoundOptions, BoundReport, ReportFormat,
    SweepOptions,
};
use l2plus::linsys::{hinf_norm, LowerBoundConfig, DEFAULT_HINF_TOL};
use l2plus::{Error, StateSpace};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "l2plus",
    version,
    about = "Upper bounds of the L2 gain under nonnegative inputs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the H-infinity norm of the system.
    Hinf(HinfArgs),
    /// Print one bound for a filter pole and degree.
    Analyze(AnalyzeArgs),
    /// Bounds for every pole and N = 0..=max-degree, with ordering checks.
    Sweep(SweepArgs),
    /// Small-gain certificate for feedback with a nonnegative nonlinearity.
    Smallgain(AnalyzeArgs),
    /// Rerun a built-in benchmark against its reference values.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct HinfArgs {
    /// System description (JSON with A, B, C, D).
    #[arg(long)]
    system: PathBuf,
    /// Bisection tolerance.
    #[arg(long, default_value_t = DEFAULT_HINF_TOL, value_parser = positive_float)]
    tol: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct AnalyzeArgs {
    #[arg(long)]
    system: PathBuf,
    /// Filter pole (must be negative).
    #[arg(long, default_value_t = -1.0)]
    alpha: f64,
    /// Filter degree N (0 = no filter).
    #[arg(long, default_value_t = 0)]
    degree: usize,
    /// Conic solver gap and feasibility tolerance.
    #[arg(long, value_parser = positive_float)]
    tol: Option<f64>,
    /// Print machine-readable output instead of the summary.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long)]
    system: PathBuf,
    /// Filter pole; repeat for several columns.
    #[arg(long = "alpha", required = true)]
    alphas: Vec<f64>,
    #[arg(long)]
    max_degree: usize,
    /// Report file; the format defaults to the extension, else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed of the sampled lower bound.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = positive_float)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: reproduce::Target,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be positive and finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Failure of a subcommand that maps to a nonzero exit code.
#[derive(Debug)]
enum Failure {
    Domain(String),
    /// Already reported on stdout (reproduction mismatch).
    Silent,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Domain(msg) => f.write_str(msg),
            Failure::Silent => Ok(()),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Hinf(a) => cmd_hinf(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Smallgain(a) => cmd_smallgain(&a),
        Command::Reproduce(a) => reproduce::run(a.target, a.format == Some(Format::Json)),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Silent) => EXIT_DOMAIN,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DOMAIN
        }
    }
}

fn load_system(path: &Path) -> Result<StateSpace, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::Domain(format!("cannot read system file `{}`: {e}", path.display()))
    })?;
    StateSpace::from_json_str(&text)
        .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

fn bound_options(tol: Option<f64>) -> BoundOptions {
    let mut options = BoundOptions::default();
    if let Some(tol) = tol {
        options.solver.tol_gap_abs = tol;
        options.solver.tol_gap_rel = tol;
        options.solver.tol_feas = tol;
    }
    options
}

fn system_name(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| "system".into(), |s| s.to_string_lossy().into_owned())
}

fn print_json<T: Serialize>(value: &T) -> CmdResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Domain(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_hinf(args: &HinfArgs) -> CmdResult {
    let ss = load_system(&args.system)?;
    println!("{:.6}", hinf_norm(&ss, args.tol)?);
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeOutput {
    alpha: f64,
    #[serde(rename = "N")]
    degree: usize,
    gamma: f64,
    status: String,
    gap: f64,
    seconds: f64,
}

fn cmd_analyze(args: &AnalyzeArgs) -> CmdResult {
    let ss = load_system(&args.system)?;
    ss.validate_for_analysis()?;
    let cell = solve_cell_with(&ss, args.alpha, args.degree, &bound_options(args.tol))?;
    let out = AnalyzeOutput {
        alpha: cell.alpha,
        degree: cell.degree,
        gamma: cell.gamma(),
        status: cell.result.status.to_string(),
        gap: cell.result.relative_gap,
        seconds: cell.seconds,
    };
    match args.format {
        Some(Format::Json) => print_json(&out),
        Some(Format::Csv) => {
            println!("alpha,N,gamma,status,gap,seconds");
            println!(
                "{},{},{},{},{},{}",
                out.alpha, out.degree, out.gamma, out.status, out.gap, out.seconds
            );
            Ok(())
        }
        None => {
            println!("{:.6}", out.gamma);
            Ok(())
        }
    }
}

fn cmd_smallgain(args: &AnalyzeArgs) -> CmdResult {
    let ss = load_system(&args.system)?;
    let cert = certify_small_gain_with(&ss, args.alpha, args.degree, &bound_options(args.tol))?;
    match args.format {
        Some(Format::Json) => print_json(&cert),
        Some(Format::Csv) => Err(Failure::Domain(
            "smallgain supports --format json only".into(),
        )),
        None => {
            println!("method: {}", cert.method.as_str());
            println!("hinf: {:.6}", cert.hinf);
            if let Some(b) = cert.bound {
                println!(
                    "bound (alpha = {:.6}, N = {}): {:.6}",
                    args.alpha, args.degree, b
                );
            }
            match cert.gamma_used {
                Some(g) => println!("certified: closed loop is L2-stable for every admissible nonlinearity (gain {g:.6} < 1)"),
                None => println!("certified: no"),
            }
            Ok(())
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let ss = load_system(&args.system)?;
    let options = SweepOptions {
        system: system_name(&args.system),
        bound: bound_options(args.tol),
        lower_bound: Some(LowerBoundConfig {
            seed: args.seed,
            ..Default::default()
        }),
        ..Default::default()
    };
    let report = sweep_with(&ss, &args.alphas, args.max_degree, &options)?;
    let format = args.format.map(|f| match f {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    });
    match &args.out {
        Some(path) => {
            let format = format
                .or_else(|| ReportFormat::from_path(path))
                .unwrap_or(ReportFormat::Json);
            report.write(path, format)?;
            print_summary(&report);
            println!("report written to {}", path.display());
        }
        None => match format {
            Some(ReportFormat::Json) => println!("{}", report.to_json()?),
            Some(ReportFormat::Csv) => print!("{}", report.to_csv()?),
            None => {
                print_table(&report);
                print_summary(&report);
            }
        },
    }
    if report.failed_rows().next().is_some() {
        return Err(Failure::Domain(format!(
            "{} cell(s) failed; see the report",
            report.failed_rows().count()
        )));
    }
    Ok(())
}

fn print_table(report: &BoundReport) {
    println!(
        "{:>10} {:>3} {:>10} {:>18} {:>13} {:>10}",
        "alpha", "N", "gamma", "status", "gap", "seconds"
    );
    for r in &report.rows {
        let gamma = r.gamma.map_or_else(|| "-".into(), |g| format!("{g:.6}"));
        let gap = r.gap.map_or_else(|| "-".into(), |g| format!("{g:.6e}"));
        println!(
            "{:>10.6} {:>3} {:>10} {:>18} {:>13} {:>10.6}",
            r.alpha, r.degree, gamma, r.status, gap, r.seconds
        );
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "NO"
    }
}

fn print_summary(report: &BoundReport) {
    println!("hinf: {:.6}", report.hinf);
    if let Some(lb) = &report.lower_bound {
        println!(
            "sampled lower bound: {:.6} ({} trials, seed {})",
            lb.gamma_lb, lb.trials, lb.seed
        );
    }
    if let Some((alpha, n, g)) = report.best() {
        println!("best bound: {g:.6} at alpha = {alpha:.6}, N = {n}");
    }
    for m in &report.monotonicity {
        println!(
            "alpha = {:.6}: non-increasing in N: {}",
            m.alpha,
            verdict(m.non_increasing)
        );
    }
    for w in &report.warnings {
        println!("warning: {w}");
    }
}

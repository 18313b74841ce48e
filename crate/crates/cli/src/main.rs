use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supermodular_core::coverage::{build_coverage_objective, eps_percentile, gen_gaussian_mixture, load_points};
use supermodular_core::extensions::{eval, CubePoint, ExtensionKind};
use supermodular_core::minimize::{coverage_experiment, write_results_csv, CuttingPlaneOptions, KindsMode};
use supermodular_core::oracle::{fixture, run_suite};
use supermodular_core::setfn::SetFunctionOracle;
use supermodular_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_VIOLATION: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(name = "supermod", version, about = "Convex extensions and budgeted minimization of supermodular set functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Budget sweep on a coverage instance; writes results.csv and results.json.
    Experiment(ExperimentArgs),
    /// Evaluate one extension at one point.
    Eval(EvalArgs),
    /// Run a property-check suite and print a JSON report.
    Check(CheckArgs),
    /// Write a Gaussian-mixture point cloud as CSV.
    GenData(GenArgs),
}

#[derive(Args)]
struct GenParams {
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kinds {
    Margin,
    Joint,
    Both,
}

#[derive(Args)]
struct ExperimentArgs {
    /// CSV of points; generated from --n/--dim/--k/--seed when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    #[command(flatten)]
    gen: GenParams,
    /// Percentile of pairwise distances used as the coverage radius.
    #[arg(long, default_value_t = 0.9)]
    q: f64,
    /// Coverage radius; overrides --q.
    #[arg(long)]
    epsilon: Option<f64>,
    /// `a:b:step`, a comma-separated list, or one budget.
    #[arg(long, default_value = "10:160:10")]
    budgets: String,
    #[arg(long, value_enum, default_value = "both")]
    kinds: Kinds,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Fixture name (FIG2, FIG3a, FIG3b, P3, P9, P9b, P17) or a JSON table file.
    #[arg(long)]
    function: String,
    #[arg(long)]
    kind: String,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value = "default")]
    suite: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    gen: GenParams,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Json(_) | Error::Parse { .. } => EXIT_IO,
        Error::Solver(_) => EXIT_SOLVER,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Experiment(a) => cmd_experiment(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Check(a) => cmd_check(a),
        Command::GenData(a) => cmd_gen_data(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}

fn parse_budgets(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("cannot parse budgets {text:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let budgets: Vec<usize> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step == 0 || a > b {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if budgets.is_empty() || budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Usage("budgets must be non-empty and strictly increasing".into()));
    }
    Ok(budgets)
}

fn cmd_experiment(a: ExperimentArgs) -> Result<(), Failure> {
    if !(a.q > 0.0 && a.q <= 1.0) {
        return Err(Failure::Usage(format!("--q must lie in (0, 1], got {}", a.q)));
    }
    let budgets = parse_budgets(&a.budgets)?;
    let points = match &a.input {
        Some(path) => load_points(path)?,
        None => gen_gaussian_mixture(a.gen.n, a.gen.dim, a.gen.k, a.gen.seed)?,
    };
    let epsilon = match a.epsilon {
        Some(e) => e,
        None => eps_percentile(&points, a.q)?,
    };
    let (inst, g) = build_coverage_objective(points, epsilon)?;
    let mode = match a.kinds {
        Kinds::Margin => KindsMode::Margin,
        Kinds::Joint => KindsMode::Joint,
        Kinds::Both => KindsMode::Both,
    };
    let res = coverage_experiment(&inst, &g, &budgets, mode, &CuttingPlaneOptions::default())?;

    fs::create_dir_all(&a.out)?;
    let mut csv = Vec::new();
    write_results_csv(&res.rows, &mut csv)?;
    fs::write(a.out.join("results.csv"), &csv)?;
    let json = serde_json::json!({
        "n": inst.n(),
        "epsilon": res.epsilon,
        "gamma": res.gamma,
        "budgets": budgets,
        "rows": res.rows,
        "margin": res.margin,
        "joint": res.joint,
    });
    fs::write(a.out.join("results.json"), serde_json::to_string_pretty(&json).map_err(Error::Json)?)?;

    let cell = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    println!("n = {}, epsilon = {:.6}, gamma = {:.6}", inst.n(), res.epsilon, res.gamma);
    println!("{:>7} {:>14} {:>14} {:>10} {:>14}", "budget", "margin bound", "joint bound", "greedy", "offline bound");
    for r in &res.rows {
        println!(
            "{:>7} {:>14} {:>14} {:>10} {:>14.3}",
            r.budget,
            cell(r.lp_bound_margin),
            cell(r.lp_bound_joint),
            r.greedy_value,
            r.offline_bound
        );
    }
    Ok(())
}

fn load_function(name: &str) -> Result<SetFunctionOracle, Failure> {
    if let Ok(f) = fixture(name) {
        return Ok(f.oracle);
    }
    let path = Path::new(name);
    if path.exists() {
        return Ok(SetFunctionOracle::from_json(&fs::read_to_string(path)?)?);
    }
    Err(Failure::Usage(format!("{name:?} is neither a fixture name nor a readable JSON file")))
}

/// Rounds to 12 significant digits and prints the shortest representation.
fn format_significant(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    rounded.to_string()
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    let g = load_function(&a.function)?;
    let kind: ExtensionKind = a.kind.parse()?;
    let coords = a
        .point
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("cannot parse point {:?}", a.point)))?;
    let v = eval(kind, &g, &CubePoint::new(coords)?)?;
    println!("{}", format_significant(v));
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let report = run_suite(&a.suite, a.seed)?;
    let text = serde_json::to_string_pretty(&report).map_err(Error::Json)?;
    println!("{text}");
    if let Some(path) = &a.out {
        fs::write(path, &text)?;
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Failure::Violation(format!("{} check(s) failed: {}", failed.len(), failed.join("; "))))
    }
}

fn cmd_gen_data(a: GenArgs) -> Result<(), Failure> {
    let points = gen_gaussian_mixture(a.gen.n, a.gen.dim, a.gen.k, a.gen.seed)?;
    match &a.out {
        Some(path) => points.write_csv(fs::File::create(path)?)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            points.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_specs() {
        assert!(matches!(parse_budgets("10:40:10"), Ok(v) if v == vec![10, 20, 30, 40]));
        assert!(matches!(parse_budgets("1,2,3"), Ok(v) if v == vec![1, 2, 3]));
        assert!(matches!(parse_budgets("5"), Ok(v) if v == vec![5]));
        assert!(parse_budgets("3,2").is_err());
        assert!(parse_budgets("1:5:0").is_err());
        assert!(parse_budgets("x").is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.75), "0.75");
        assert_eq!(format_significant(-0.19999999999999996), "-0.2");
        assert_eq!(format_significant(4.0), "4");
        assert_eq!(format_significant(-0.0), "0");
    }
}

//! The `mixmean` command line.
//!
//! Exit status: 0 on success, 1 when a theorem suite finds a confirmed
//! violation, 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::hardy::hardy_mixed_sum;
use crate::means::{
    parse_rational_list, power_mean, symmetric_mean, Exponent, Mode, NormalizedWeights, PositiveVector, WeightSequence,
};
use crate::mixed::mixed_mean;
use crate::report::{CheckConfig, Instance};
use crate::search::{
    maximize_ratio, replay, run_eq33, search_counterexample, InequalityId, InstanceGenerator, OptTarget, SearchReport,
    SuiteParams, ValueDistribution, WeightMode,
};

/// Set to anything but `0` to require `--seed` on randomized commands.
pub const CI_ENV: &str = "MIXMEAN_CI";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mixmean", version, about = "Mixed-mean inequalities in checked high precision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a mean of a vector with its error bound
    Compute(ComputeArgs),
    /// Run a verification suite and print a JSON report
    Verify(SuiteArgs),
    /// Search for counterexamples and print a JSON report
    Search(SuiteArgs),
    /// Maximize a ratio or margin and print a JSON report
    Optimize(OptimizeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeanKind {
    Power,
    Symmetric,
    Mixed,
    HardySum,
}

#[derive(Debug, Args)]
struct Precision {
    /// Working precision in bits
    #[arg(long, default_value_t = 128)]
    prec: u32,
    /// Relative tolerance for calling a near-zero margin an equality [default: 2^-64]
    #[arg(long, default_value_t = CheckConfig::DEFAULT_EQUALITY_TOL, hide_default_value = true)]
    tol: f64,
}

impl Precision {
    fn config(&self) -> Result<CheckConfig> {
        CheckConfig::new(self.prec, self.tol)
    }
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(long, value_enum)]
    mean: MeanKind,
    /// Comma-separated entries, e.g. 1/3,2,0.5
    #[arg(long, allow_hyphen_values = true)]
    x: String,
    /// Normalized weights for the power mean (default uniform)
    #[arg(long)]
    q: Option<String>,
    /// Weights w_1..w_n for mixed means (default unit)
    #[arg(long)]
    w: Option<String>,
    /// Exponent (power), order (symmetric) or inner exponent (mixed)
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Outer exponent (mixed)
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    #[arg(long, default_value_t = 128)]
    prec: u32,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    /// Inequality id
    #[arg(long)]
    ineq: String,
    /// Number of random trials (verify)
    #[arg(long)]
    trials: Option<u64>,
    /// Number of random trials (search)
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// log-uniform, uniform, near-constant, decaying or mixed
    #[arg(long)]
    dist: Option<String>,
    /// unit, nanjundiah or holland-only
    #[arg(long)]
    weights: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
    /// Convex function: square, exp, neglog, pow:<p>, optionally prefixed by -
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// Largest i for eq33
    #[arg(long, default_value_t = 10_000)]
    i_max: u32,
    #[arg(long)]
    retry_budget: Option<usize>,
    /// Re-evaluate one persisted instance (JSON) instead of sampling
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Also write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    precision: Precision,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// hardy-ratio, open-question or rado-gap
    #[arg(long)]
    target: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1_000)]
    budget: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the iteration trace as CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    prec: u32,
}

#[derive(Clone, Copy)]
enum Flavor {
    Verify,
    Search,
}

fn ci_mode_from_env() -> bool {
    std::env::var(CI_ENV).is_ok_and(|v| !v.is_empty() && v != "0")
}

fn seed_or_default(seed: Option<u64>, ci: bool) -> Result<u64> {
    match seed {
        Some(s) => Ok(s),
        None if ci => Err(Error::InvalidArgument(format!("{CI_ENV} is set: pass an explicit --seed"))),
        None => Ok(0),
    }
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, format!("{text}\n")).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

fn compute(args: &ComputeArgs) -> Result<i32> {
    let prec = args.prec;
    if prec < 2 {
        return Err(Error::InvalidArgument("precision must be at least 2 bits".into()));
    }
    let entries = parse_rational_list(&args.x)?;
    let value = match args.mean {
        MeanKind::Power => {
            let x = PositiveVector::new(entries)?;
            let q = match &args.q {
                Some(q) => NormalizedWeights::new(parse_rational_list(q)?)?,
                None => NormalizedWeights::uniform(x.len()),
            };
            let r: Exponent = args.r.as_deref().unwrap_or("1").parse()?;
            power_mean(&q, &x, &r, prec)?
        }
        MeanKind::Symmetric => {
            let x = PositiveVector::with_mode(entries, Mode::NonNegative)?;
            let r: usize = args
                .r
                .as_deref()
                .unwrap_or("1")
                .parse()
                .map_err(|_| Error::Parse("symmetric order must be a non-negative integer".into()))?;
            symmetric_mean(&x, r, prec)?
        }
        MeanKind::Mixed => {
            let x = PositiveVector::new(entries)?;
            let w = match &args.w {
                Some(w) => WeightSequence::new(parse_rational_list(w)?)?,
                None => WeightSequence::unit(x.len()),
            };
            let inner: Exponent = args.r.as_deref().unwrap_or("1").parse()?;
            let outer: Exponent = args.s.as_deref().unwrap_or("geo").parse()?;
            mixed_mean(&w, &x, &outer, &inner, prec)?
        }
        MeanKind::HardySum => {
            let x = PositiveVector::with_mode(entries, Mode::NonNegative)?;
            hardy_mixed_sum(&x, prec)?
        }
    };
    emit(&value.to_string());
    Ok(EXIT_OK)
}

fn suite(args: &SuiteArgs, flavor: Flavor, ci: bool) -> Result<i32> {
    let id: InequalityId = args.ineq.parse()?;
    let cfg = args.precision.config()?;
    let report: SearchReport = if let Some(path) = &args.replay {
        let text = fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        let inst: Instance = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("instance JSON: {e}")))?;
        replay(id, &inst, &cfg)?
    } else if id == InequalityId::Eq33 {
        run_eq33(args.i_max, &cfg)?
    } else {
        let seed = seed_or_default(args.seed, ci)?;
        let (default_budget, default_n_max, default_dist) = match flavor {
            Flavor::Verify => (1_000, 10, ValueDistribution::log_uniform()),
            Flavor::Search => (10_000, 8, ValueDistribution::Mixed),
        };
        let budget = match flavor {
            Flavor::Verify => args.trials.or(args.budget),
            Flavor::Search => args.budget.or(args.trials),
        }
        .unwrap_or(default_budget);
        let weights: WeightMode = match &args.weights {
            Some(w) => w.parse()?,
            None => WeightMode::Unit,
        };
        let floor = if weights == WeightMode::HollandOnly { 3 } else { id.min_n() };
        let n_min = args.n_min.unwrap_or(floor);
        let n_max = args.n_max.unwrap_or(default_n_max.max(n_min));
        let dist = match &args.dist {
            Some(d) => d.parse()?,
            None => default_dist,
        };
        let mut gen = InstanceGenerator::new(n_min, n_max, seed)?
            .with_distribution(dist)?
            .with_weights(weights)?;
        if let Some(b) = args.retry_budget {
            gen = gen.with_retry_budget(b)?;
        }
        let params = SuiteParams {
            r: args.r.clone(),
            s: args.s.clone(),
            f: args.f.clone(),
            p: args.p.clone(),
        };
        search_counterexample(id, &gen, &params, budget, &cfg)?
    };
    let json = report.to_json();
    emit(&json);
    write_out(&args.out, &json)?;
    eprintln!(
        "{}: {} trials, {} holds, {} equality, {} violated, {} indeterminate ({:.2} s)",
        report.inequality,
        report.trials,
        report.holds,
        report.equality,
        report.violated,
        report.indeterminate,
        report.wall_time.as_secs_f64()
    );
    if report.violated > 0 && report.report_only {
        eprintln!("note: confirmed violation(s) of a report-only inequality; instances are in the report");
    }
    Ok(suite_exit_code(&report))
}

fn suite_exit_code(report: &SearchReport) -> i32 {
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn optimize(args: &OptimizeArgs, ci: bool) -> Result<i32> {
    let target: OptTarget = args.target.parse()?;
    let seed = seed_or_default(args.seed, ci)?;
    CheckConfig::with_precision(args.prec)?;
    let report = maximize_ratio(target, args.n, args.budget, seed, args.prec)?;
    let json = report.to_json();
    emit(&json);
    write_out(&args.out, &json)?;
    if let Some(path) = &args.trace {
        let file = fs::File::create(path).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
        report
            .write_trace_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
    }
    eprintln!(
        "{target}: best {} after {} evaluations",
        report.best_value, report.evaluations
    );
    let contradicts_theorem = target != OptTarget::OpenQuestionMargin && report.threshold_exceeded > 0;
    Ok(if contradicts_theorem { EXIT_VIOLATION } else { EXIT_OK })
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit status.
pub fn run_with<I, T>(args: I, ci: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Compute(a) => compute(a),
        Command::Verify(a) => suite(a, Flavor::Verify, ci),
        Command::Search(a) => suite(a, Flavor::Search, ci),
        Command::Optimize(a) => optimize(a, ci),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Entry point for the binary: process arguments and the CI variable.
pub fn run() -> i32 {
    run_with(std::env::args_os(), ci_mode_from_env())
}

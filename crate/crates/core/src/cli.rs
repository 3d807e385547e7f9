//! Command-line front end. All indices on the command line and in output are
//! 0-based.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error or failed verification,
//! 3 resource limit (a partial report is still written).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{format_summary, run_bench, summarize, write_csv, BenchConfig};
use crate::error::{Error, Result};
use crate::formulas::{verify_spec, VerifyMode, VerifyReport};
use crate::geometry::{chebyshev_fit, gen_synthetic, Dataset, GeometricOracle};
use crate::influence::{default_q, exact_influences, sample_influences, SampleBudget, DEFAULT_M};
use crate::oracle::{builtin, IdealSpec, Oracle, SyntheticOracle};
use crate::solvers::{
    bmf_maxcon_with, exact_maxcon, greedy_maxcon, BmfOptions, ExactLimits, Method, SolveReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Caps the worker pool size.
pub const THREADS_ENV: &str = "MAXCON_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "maxcon",
    version,
    about = "Maximum consensus via monotone Boolean function influences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic linear-regression dataset.
    Gen(GenArgs),
    /// Solve maximum consensus on a dataset file.
    Solve(SolveArgs),
    /// Dump exact or sampled influences of a dataset or specification.
    Influence(InfluenceArgs),
    /// Compare closed-form influences with cube enumeration.
    VerifyIdeal(VerifyArgs),
    /// Run the outlier-sweep benchmark and write CSV.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub outliers: usize,
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the generated tolerance.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Max,
    Linf,
    Exact,
    Greedy,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Max => Method::Max,
            MethodArg::Linf => Method::Linf,
            MethodArg::Exact => Method::Exact,
            MethodArg::Greedy => Method::Greedy,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Dataset JSON.
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Max)]
    pub method: MethodArg,
    /// Samples per influence estimate.
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: usize,
    /// Sampling probability; defaults to (dim + 3) / N.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the dataset tolerance.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Reuse influence estimates across iterations.
    #[arg(long)]
    pub stale: bool,
    /// Exact search: deepest removal level.
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Exact search: largest level size.
    #[arg(long, default_value_t = ExactLimits::default().max_frontier)]
    pub max_frontier: usize,
    /// Writes `index,residual,label` for the fit on the solution.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InfluenceMode {
    Exact,
    Sampled,
}

#[derive(Args, Debug)]
pub struct InfluenceArgs {
    /// Built-in id (ex1..ex4), specification JSON, or dataset JSON.
    pub source: String,
    #[arg(long, value_enum, default_value_t = InfluenceMode::Exact)]
    pub mode: InfluenceMode,
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: usize,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Built-in id (ex1..ex4) or specification JSON.
    pub spec: String,
    /// Ignore overlaps between upper zeros.
    #[arg(long)]
    pub assume_ideal: bool,
    /// Print the JSON report instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Outlier counts: `3..8` (inclusive), `3,5,7`, or a single count.
    #[arg(long, default_value = "3..8", value_parser = parse_sweep)]
    pub outliers: Sweep,
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 50)]
    pub repeats: usize,
    /// First seed; repeat r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "max,linf,exact"
    )]
    pub methods: Vec<MethodArg>,
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: usize,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = ExactLimits::default().max_frontier)]
    pub max_frontier: usize,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep(pub Vec<usize>);

pub fn parse_sweep(s: &str) -> std::result::Result<Sweep, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let counts = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(num)
            .collect::<std::result::Result<Vec<_>, _>>()?
    };
    Ok(Sweep(counts))
}

impl BenchArgs {
    pub fn config(&self) -> BenchConfig {
        BenchConfig {
            dim: self.dim,
            n: self.n,
            outlier_sweep: self.outliers.0.clone(),
            repeats: self.repeats,
            seed: self.seed,
            methods: self.methods.iter().map(|&m| m.into()).collect(),
            m: self.m,
            q: self.q,
            exact_limits: ExactLimits {
                max_depth: None,
                max_frontier: self.max_frontier,
            },
            output: self.out.clone(),
        }
    }
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ResourceLimit { .. } => EXIT_RESOURCE,
        Error::Config(_) | Error::InvalidBudget(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (including the program name), runs the command, and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
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
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gen(a) => cmd_gen(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Influence(a) => cmd_influence(&a),
        Command::VerifyIdeal(a) => cmd_verify_ideal(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') {
        text.to_string()
    } else {
        format!("{text}\n")
    };
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn cmd_gen(a: &GenArgs) -> Result<i32> {
    let mut data = gen_synthetic(a.n, a.outliers, a.dim, a.seed)?;
    if let Some(eps) = a.epsilon {
        data = data.with_epsilon(eps)?;
    }
    emit(a.out.as_deref(), &data.to_json())?;
    eprintln!(
        "N={} outliers={} dim={} epsilon={} seed={}",
        data.len(),
        data.outliers().len(),
        data.dim(),
        data.epsilon(),
        a.seed
    );
    Ok(EXIT_OK)
}

fn load_dataset(path: &Path, epsilon: Option<f64>) -> Result<Dataset> {
    let data = Dataset::load(path)?;
    match epsilon {
        Some(e) => data.with_epsilon(e),
        None => Ok(data),
    }
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let data = load_dataset(&a.data, a.epsilon)?;
    let n = data.len();
    let q = a.q.unwrap_or_else(|| default_q(data.dim(), n));
    let budget = SampleBudget::new(a.m, q, a.seed)?;
    let oracle = GeometricOracle::new(data.clone());
    let method: Method = a.method.into();
    let result = match method {
        Method::Max | Method::Linf => bmf_maxcon_with(
            &oracle,
            method,
            &budget,
            BmfOptions {
                reestimate: !a.stale,
                ..Default::default()
            },
        ),
        Method::Exact => exact_maxcon(
            &oracle,
            ExactLimits {
                max_depth: a.max_depth,
                max_frontier: a.max_frontier,
            },
        ),
        Method::Greedy => greedy_maxcon(&oracle, &(0..n).collect::<Vec<_>>()),
    };
    let (report, code) = match result {
        Ok(r) => (r, EXIT_OK),
        Err(Error::ResourceLimit {
            depth,
            nodes,
            partial: Some(p),
        }) => {
            eprintln!(
                "resource limit at depth {depth} after {nodes} sets; writing greedy partial result"
            );
            (*p, EXIT_RESOURCE)
        }
        Err(e) => return Err(e),
    };
    emit(a.out.as_deref(), &report.to_json())?;
    if let Some(path) = &a.residuals {
        write_residuals(&data, &report, path)?;
    }
    eprintln!(
        "{}: consensus {}/{} after {} iterations, {} oracle queries, {:.3}s",
        report.method,
        report.consensus_size,
        n,
        report.iterations,
        report.oracle_queries,
        report.wall_time
    );
    Ok(code)
}

fn write_residuals(data: &Dataset, report: &SolveReport, path: &Path) -> Result<()> {
    let theta = if report.solution.is_empty() {
        vec![0.0; data.dim()]
    } else {
        chebyshev_fit(data, report.solution)?.theta
    };
    std::fs::write(path, data.residuals_csv(&theta)?)?;
    Ok(())
}

/// Built-in id or path to a specification JSON.
pub fn load_spec(source: &str) -> Result<IdealSpec> {
    match builtin(source) {
        Some(s) => Ok(s),
        None => IdealSpec::from_json(&std::fs::read_to_string(source)?),
    }
}

pub fn cmd_influence(a: &InfluenceArgs) -> Result<i32> {
    enum Source {
        Spec(IdealSpec),
        Data(Dataset),
    }
    let source = match builtin(&a.source) {
        Some(s) => Source::Spec(s),
        None => {
            let text = std::fs::read_to_string(&a.source)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if value.get("upper_zeros").is_some() {
                Source::Spec(IdealSpec::from_json(&text)?)
            } else {
                let d = Dataset::from_json(&text)?;
                Source::Data(match a.epsilon {
                    Some(e) => d.with_epsilon(e)?,
                    None => d,
                })
            }
        }
    };
    let oracle: Box<dyn Oracle> = match source {
        Source::Spec(s) => Box::new(SyntheticOracle::new(s)),
        Source::Data(d) => Box::new(GeometricOracle::new(d)),
    };
    let n = oracle.universe();
    let vector = match a.mode {
        InfluenceMode::Exact => exact_influences(oracle.as_ref(), n)?,
        InfluenceMode::Sampled => {
            let q =
                a.q.unwrap_or_else(|| default_q(oracle.combinatorial_dimension(), n));
            let budget = SampleBudget::new(a.m, q, a.seed)?;
            sample_influences(oracle.as_ref(), &(0..n).collect::<Vec<_>>(), &budget)?
        }
    };
    emit(a.out.as_deref(), &vector.to_json())?;
    if let Some(i) = vector.argmax() {
        eprintln!(
            "most influential point: {i} ({} oracle queries)",
            oracle.queries()
        );
    }
    Ok(EXIT_OK)
}

/// Plain-text table of a verification report.
pub fn format_verify_table(report: &VerifyReport) -> String {
    let spec = &report.spec;
    let mut s = format!(
        "n={} p={} upper zeros: {}",
        spec.n(),
        spec.p(),
        spec.upper_zeros()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    );
    if !report.pseudo_upper_zeros.is_empty() {
        s += &format!(
            "  pseudo: {}",
            report
                .pseudo_upper_zeros
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    let width = report
        .points
        .iter()
        .map(|p| p.cell.to_string().len())
        .max()
        .unwrap_or(4)
        .max(4);
    writeln!(s).expect("string write");
    writeln!(
        s,
        "{:>5}  {:<width$}  {:>11}  {:>11}  match",
        "point", "cell", "enumerated", "closed-form"
    )
    .expect("string write");
    for p in &report.points {
        writeln!(
            s,
            "{:>5}  {:<width$}  {:>11}  {:>11}  {}",
            p.index,
            p.cell.to_string(),
            p.enumeration,
            p.formula,
            if p.matched { "yes" } else { "NO" }
        )
        .expect("string write");
    }
    writeln!(
        s,
        "all match: {}  ordering holds: {}",
        report.all_match, report.ordering_holds
    )
    .expect("string write");
    s
}

pub fn cmd_verify_ideal(a: &VerifyArgs) -> Result<i32> {
    let spec = load_spec(&a.spec)?;
    let mode = if a.assume_ideal {
        VerifyMode::AssumeIdeal
    } else {
        VerifyMode::Auto
    };
    let report = verify_spec(&spec, mode)?;
    let json = serde_json::to_string_pretty(&report)?;
    if a.json {
        emit(None, &json)?;
    } else {
        print!("{}", format_verify_table(&report));
    }
    if let Some(p) = &a.out {
        emit(Some(p), &json)?;
    }
    Ok(if report.all_match { EXIT_OK } else { EXIT_DATA })
}

pub fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    let cfg = a.config();
    let rows = run_bench(&cfg)?;
    match &cfg.output {
        Some(p) => write_csv(&rows, std::io::BufWriter::new(std::fs::File::create(p)?))?,
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    eprint!("{}", format_summary(&summarize(&rows)));
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        assert_eq!(parse_sweep("3..8").unwrap().0, vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(parse_sweep("3..=5").unwrap().0, vec![3, 4, 5]);
        assert_eq!(parse_sweep("2,4,6").unwrap().0, vec![2, 4, 6]);
        assert_eq!(parse_sweep("7").unwrap().0, vec![7]);
        assert!(parse_sweep("8..3").is_err());
        assert!(parse_sweep("a").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["maxcon"]), EXIT_USAGE);
        assert_eq!(run(["maxcon", "gen"]), EXIT_USAGE);
        assert_eq!(
            run(["maxcon", "solve", "x.json", "--method", "ransac"]),
            EXIT_USAGE
        );
        assert_eq!(run(["maxcon", "--help"]), EXIT_OK);
    }

    #[test]
    fn verify_table_lists_every_point() {
        let report = verify_spec(&builtin("ex1").unwrap(), VerifyMode::Auto).unwrap();
        let table = format_verify_table(&report);
        assert_eq!(table.lines().count(), 1 + 1 + 7 + 1);
        assert!(table.contains("all match: true"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::NoBasis), EXIT_DATA);
        let limit = Error::ResourceLimit {
            depth: 1,
            nodes: 1,
            partial: None,
        };
        assert_eq!(exit_code(&limit), EXIT_RESOURCE);
    }
}

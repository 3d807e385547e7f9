//! Synthetic regression benchmark: sweep outlier counts, solve with several
//! methods, emit one CSV row per run and a percentile summary.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{gen_synthetic, GeometricOracle};
use crate::influence::{default_q, SampleBudget, DEFAULT_M};
use crate::solvers::{bmf_maxcon, exact_maxcon, greedy_maxcon, ExactLimits, Method, SolveReport};

/// First line of every CSV; bump the version when columns change.
pub const CSV_VERSION_LINE: &str = "# maxcon-bench v1";
pub const CSV_COLUMNS: &str =
    "method,n,n_out,seed,consensus,exact_gap,iterations,oracle_queries,wall_time,status";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub dim: usize,
    pub n: usize,
    pub outlier_sweep: Vec<usize>,
    pub repeats: usize,
    /// Repeat `r` uses seed `seed + r` for both data and sampling.
    pub seed: u64,
    pub methods: Vec<Method>,
    pub m: usize,
    pub q: Option<f64>,
    pub exact_limits: ExactLimits,
    pub output: Option<PathBuf>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            dim: 4,
            n: 30,
            outlier_sweep: (3..=8).collect(),
            repeats: 50,
            seed: 0,
            methods: vec![Method::Max, Method::Linf, Method::Exact],
            m: DEFAULT_M,
            q: None,
            exact_limits: ExactLimits::default(),
            output: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.outlier_sweep.is_empty() {
            return bad("outlier sweep is empty".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad(format!("method {m} listed twice"));
            }
        }
        if self.n == 0 || self.n > crate::cube::MAX_UNIVERSE {
            return bad(format!("n must be in 1..={}", crate::cube::MAX_UNIVERSE));
        }
        if let Some(&k) = self.outlier_sweep.iter().find(|&&k| k >= self.n) {
            return bad(format!(
                "{k} outliers leave no inliers among {} points",
                self.n
            ));
        }
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        SampleBudget::new(self.m, self.q.unwrap_or(0.5), 0)?;
        Ok(())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.repeats as u64).map(|r| self.seed.wrapping_add(r))
    }

    pub fn budget(&self, seed: u64) -> Result<SampleBudget> {
        SampleBudget::new(
            self.m,
            self.q.unwrap_or_else(|| default_q(self.dim, self.n)),
            seed,
        )
    }
}

/// One CSV row. Measurement fields are `None` (empty) when the run failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    pub n_out: usize,
    pub seed: u64,
    pub consensus: Option<usize>,
    /// Exact optimum minus this method's consensus.
    pub exact_gap: Option<i64>,
    pub iterations: Option<usize>,
    pub oracle_queries: Option<u64>,
    pub wall_time: Option<f64>,
    pub status: String,
}

impl BenchRow {
    fn from_report(
        cfg: &BenchConfig,
        method: Method,
        n_out: usize,
        seed: u64,
        r: &SolveReport,
        status: &str,
    ) -> Self {
        Self {
            method,
            n: cfg.n,
            n_out,
            seed,
            consensus: Some(r.consensus_size),
            exact_gap: None,
            iterations: Some(r.iterations),
            oracle_queries: Some(r.oracle_queries),
            wall_time: Some(r.wall_time),
            status: status.into(),
        }
    }

    fn failed(cfg: &BenchConfig, method: Method, n_out: usize, seed: u64, err: &Error) -> Self {
        Self {
            method,
            n: cfg.n,
            n_out,
            seed,
            consensus: None,
            exact_gap: None,
            iterations: None,
            oracle_queries: None,
            wall_time: None,
            status: format!("error: {err}"),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn run_one(cfg: &BenchConfig, n_out: usize, seed: u64) -> Vec<BenchRow> {
    let data = match gen_synthetic(cfg.n, n_out, cfg.dim, seed) {
        Ok(d) => d,
        Err(e) => {
            return cfg
                .methods
                .iter()
                .map(|&m| BenchRow::failed(cfg, m, n_out, seed, &e))
                .collect()
        }
    };
    let mut rows: Vec<BenchRow> = cfg
        .methods
        .iter()
        .map(|&method| {
            // a fresh oracle per method keeps query counts separate
            let oracle = GeometricOracle::new(data.clone());
            let result = match method {
                Method::Exact => exact_maxcon(&oracle, cfg.exact_limits),
                Method::Greedy => greedy_maxcon(&oracle, &(0..cfg.n).collect::<Vec<_>>()),
                Method::Max | Method::Linf => cfg
                    .budget(seed)
                    .and_then(|b| bmf_maxcon(&oracle, method, &b)),
            };
            match result {
                Ok(r) => BenchRow::from_report(cfg, method, n_out, seed, &r, "ok"),
                Err(Error::ResourceLimit {
                    partial: Some(p), ..
                }) => BenchRow::from_report(cfg, method, n_out, seed, &p, "resource_limit"),
                Err(e) => BenchRow::failed(cfg, method, n_out, seed, &e),
            }
        })
        .collect();
    let optimum = rows
        .iter()
        .find(|r| r.method == Method::Exact && r.is_ok())
        .and_then(|r| r.consensus);
    if let Some(best) = optimum {
        for r in &mut rows {
            r.exact_gap = r.consensus.map(|c| best as i64 - c as i64);
        }
    }
    rows
}

/// Runs every (outlier count, seed, method) combination. Datasets are solved
/// in parallel; rows come back in configuration order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = cfg
        .outlier_sweep
        .iter()
        .flat_map(|&k| cfg.seeds().map(move |s| (k, s)))
        .collect();
    let rows: Vec<Vec<BenchRow>> = jobs.par_iter().map(|&(k, s)| run_one(cfg, k, s)).collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses CSV written by [`write_csv`].
pub fn read_csv(text: &str) -> Result<Vec<BenchRow>> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    if header.join(",") != CSV_COLUMNS {
        return Err(Error::Parse(format!("unexpected CSV header {header:?}")));
    }
    Ok(rd.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Linear-interpolation percentile of unsorted values, `p` in `[0, 1]`.
pub fn percentile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Least-squares slope of `ys` on `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of removal iterations against outlier count for one method.
pub fn iteration_slope(rows: &[BenchRow], method: Method) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.method == method && r.is_ok())
        .filter_map(|r| r.iterations.map(|i| (r.n_out as f64, i as f64)))
        .unzip();
    least_squares_slope(&xs, &ys)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub n_out: usize,
    pub runs: usize,
    pub failures: usize,
    pub consensus_mean: f64,
    /// `(mean, p05, p95)`; absent when exact did not run.
    pub gap: Option<(f64, f64, f64)>,
    pub iterations_mean: f64,
    pub time: (f64, f64, f64),
}

/// Groups rows by (method, outlier count) in first-seen order.
pub fn summarize(rows: &[BenchRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.method, r.n_out)) {
            keys.push((r.method, r.n_out));
        }
    }
    let mean = |v: &[f64]| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let spread = |v: &[f64]| {
        (
            mean(v),
            percentile(v, 0.05).unwrap_or(f64::NAN),
            percentile(v, 0.95).unwrap_or(f64::NAN),
        )
    };
    keys.into_iter()
        .map(|(method, n_out)| {
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.method == method && r.n_out == n_out)
                .collect();
            let ok: Vec<&BenchRow> = group.iter().copied().filter(|r| r.is_ok()).collect();
            let col = |f: &dyn Fn(&BenchRow) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let consensus = col(&|r| r.consensus.map(|c| c as f64));
            let gaps = col(&|r| r.exact_gap.map(|g| g as f64));
            let iterations = col(&|r| r.iterations.map(|i| i as f64));
            let times = col(&|r| r.wall_time);
            SummaryRow {
                method,
                n_out,
                runs: group.len(),
                failures: group.len() - ok.len(),
                consensus_mean: mean(&consensus),
                gap: (!gaps.is_empty()).then(|| spread(&gaps)),
                iterations_mean: mean(&iterations),
                time: spread(&times),
            }
        })
        .collect()
}

pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<7} {:>5} {:>5} {:>5} {:>9} {:>22} {:>7} {:>30}\n",
        "method",
        "n_out",
        "runs",
        "fail",
        "consensus",
        "gap mean [p05, p95]",
        "iters",
        "time s mean [p05, p95]"
    );
    for r in summary {
        let gap = match r.gap {
            Some((m, lo, hi)) => format!("{m:.2} [{lo:.2}, {hi:.2}]"),
            None => "-".into(),
        };
        let (t, lo, hi) = r.time;
        writeln!(
            s,
            "{:<7} {:>5} {:>5} {:>5} {:>9.2} {:>22} {:>7.2} {:>30}",
            r.method.as_str(),
            r.n_out,
            r.runs,
            r.failures,
            r.consensus_mean,
            gap,
            r.iterations_mean,
            format!("{t:.4} [{lo:.4}, {hi:.4}]")
        )
        .expect("string write");
    }
    s
}

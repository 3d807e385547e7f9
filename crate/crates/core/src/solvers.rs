//! Maximum-consensus solvers over a feasibility oracle.
//!
//! * [`bmf_maxcon`] walks down from the full set, removing at each step the
//!   point with the largest estimated influence, then refines the first
//!   feasible set with [`local_expansion`].
//! * [`exact_maxcon`] is a breadth-first search over removal depth that
//!   branches on basis points; the first feasible level is optimal.
//! * [`greedy_maxcon`] adds points in a fixed order while feasibility holds.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::PointSet;
use crate::error::{Error, Result};
use crate::influence::{sample_influences_with, SampleBudget, SampleOptions};
use crate::oracle::Oracle;

/// Which solver produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Estimate influences of every remaining point.
    Max,
    /// Estimate influences of the L∞-fit basis only.
    Linf,
    Exact,
    Greedy,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Max => "max",
            Method::Linf => "linf",
            Method::Exact => "exact",
            Method::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Method::Max),
            "linf" => Ok(Method::Linf),
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            _ => Err(Error::Parse(format!("unknown method {s:?}"))),
        }
    }
}

/// Outcome of a solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    /// Feasible consensus set.
    pub solution: PointSet,
    pub consensus_size: usize,
    /// Number of removal steps; equals `removed_sequence.len()`.
    pub iterations: usize,
    /// All oracle evaluations made by the run.
    pub oracle_queries: u64,
    /// Evaluations spent estimating influences.
    pub estimation_queries: u64,
    /// Evaluations of the current set to decide termination.
    pub termination_queries: u64,
    /// Evaluations made by the local expansion step.
    pub expansion_queries: u64,
    pub removed_sequence: Vec<usize>,
    /// Seconds.
    pub wall_time: f64,
}

impl SolveReport {
    pub const CSV_HEADER: &'static str = "method,n,consensus,iterations,oracle_queries,\
estimation_queries,termination_queries,expansion_queries,wall_time,solution";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{:.6},{}",
            self.method,
            self.solution.universe(),
            self.consensus_size,
            self.iterations,
            self.oracle_queries,
            self.estimation_queries,
            self.termination_queries,
            self.expansion_queries,
            self.wall_time,
            self.solution
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Options for [`bmf_maxcon`].
#[derive(Clone, Copy, Debug)]
pub struct BmfOptions {
    /// Draw fresh samples at every removal step. When `false`, estimates are
    /// computed once per point and reused.
    pub reestimate: bool,
    pub monotone_shortcut: bool,
}

impl Default for BmfOptions {
    fn default() -> Self {
        Self {
            reestimate: true,
            monotone_shortcut: true,
        }
    }
}

/// Influence-guided search from the full set.
pub fn bmf_maxcon<O: Oracle + ?Sized>(
    oracle: &O,
    method: Method,
    budget: &SampleBudget,
) -> Result<SolveReport> {
    bmf_maxcon_with(oracle, method, budget, BmfOptions::default())
}

pub fn bmf_maxcon_with<O: Oracle + ?Sized>(
    oracle: &O,
    method: Method,
    budget: &SampleBudget,
    options: BmfOptions,
) -> Result<SolveReport> {
    if !matches!(method, Method::Max | Method::Linf) {
        return Err(Error::Config(format!(
            "bmf_maxcon supports max and linf, not {method}"
        )));
    }
    if method == Method::Linf && !oracle.supplies_basis() {
        return Err(Error::NoBasis);
    }
    let start = Instant::now();
    let q0 = oracle.queries();
    let n = oracle.universe();
    let mut estimation_queries = 0;
    let mut termination_queries = 0;

    let mut x = PointSet::full(n)?;
    let mut removed = Vec::new();
    let mut cache: HashMap<usize, f64> = HashMap::new();

    let before = oracle.queries();
    let mut current = oracle.evaluate(x)?;
    termination_queries += oracle.queries() - before;

    while current.infeasible {
        let candidates: Vec<usize> = match method {
            Method::Max => x.members().collect(),
            // one fit serves both the termination test and the candidate set
            _ => {
                let mut b = current.basis.clone().ok_or(Error::NoBasis)?;
                b.sort_unstable();
                b
            }
        };
        if candidates.is_empty() {
            return Err(Error::NotMonotone(format!(
                "{x} is infeasible with an empty basis"
            )));
        }
        let r = if candidates.len() == 1 {
            candidates[0]
        } else {
            let missing: Vec<usize> = if options.reestimate {
                candidates.clone()
            } else {
                candidates
                    .iter()
                    .copied()
                    .filter(|i| !cache.contains_key(i))
                    .collect()
            };
            if !missing.is_empty() {
                let before = oracle.queries();
                let est = sample_influences_with(
                    oracle,
                    &missing,
                    budget,
                    SampleOptions {
                        iteration: removed.len() as u64,
                        monotone_shortcut: options.monotone_shortcut,
                    },
                )?;
                estimation_queries += oracle.queries() - before;
                for &i in &missing {
                    cache.insert(i, est.get(i).expect("candidate estimated"));
                }
            }
            // ties go to the lowest index
            let mut best = candidates[0];
            for &i in &candidates[1..] {
                if cache[&i] > cache[&best] {
                    best = i;
                }
            }
            best
        };
        x = x.without(r)?;
        removed.push(r);
        let before = oracle.queries();
        current = oracle.evaluate(x)?;
        termination_queries += oracle.queries() - before;
    }

    let before = oracle.queries();
    let solution = local_expansion(oracle, x)?;
    if solution != x && oracle.is_infeasible(solution)? {
        return Err(Error::NotMonotone(format!(
            "expanded set {solution} is infeasible"
        )));
    }
    let expansion_queries = oracle.queries() - before;

    Ok(SolveReport {
        method,
        solution,
        consensus_size: solution.level(),
        iterations: removed.len(),
        oracle_queries: oracle.queries() - q0,
        estimation_queries,
        termination_queries,
        expansion_queries,
        removed_sequence: removed,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Adds excluded points one at a time, scanning in ascending index order and
/// restarting after each success, until no single addition stays feasible.
pub fn local_expansion<O: Oracle + ?Sized>(oracle: &O, x: PointSet) -> Result<PointSet> {
    if oracle.is_infeasible(x)? {
        return Err(Error::InfeasibleInput);
    }
    let mut x = x;
    'outer: loop {
        for z in x.non_members() {
            let candidate = x.with(z)?;
            if !oracle.is_infeasible(candidate)? {
                x = candidate;
                continue 'outer;
            }
        }
        return Ok(x);
    }
}

/// Adds points in `order`, skipping any whose addition is infeasible.
///
/// `removed_sequence` lists the skipped points in the order they were tried.
pub fn greedy_maxcon<O: Oracle + ?Sized>(oracle: &O, order: &[usize]) -> Result<SolveReport> {
    let n = oracle.universe();
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::InvalidOrder(n));
    }
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidOrder(n));
        }
    }
    let start = Instant::now();
    let q0 = oracle.queries();
    let mut x = PointSet::empty(n)?;
    let mut skipped = Vec::new();
    for &i in order {
        let candidate = x.with(i)?;
        if oracle.is_infeasible(candidate)? {
            skipped.push(i);
        } else {
            x = candidate;
        }
    }
    let queries = oracle.queries() - q0;
    Ok(SolveReport {
        method: Method::Greedy,
        solution: x,
        consensus_size: x.level(),
        iterations: skipped.len(),
        oracle_queries: queries,
        estimation_queries: 0,
        termination_queries: queries,
        expansion_queries: 0,
        removed_sequence: skipped,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Bounds on [`exact_maxcon`].
#[derive(Clone, Copy, Debug)]
pub struct ExactLimits {
    /// Deepest removal level explored; `None` means `N`.
    pub max_depth: Option<usize>,
    /// Largest number of distinct sets held in one level.
    pub max_frontier: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        Self {
            max_depth: None,
            max_frontier: 2_000_000,
        }
    }
}

/// Globally optimal consensus by breadth-first basis branching.
///
/// Every set at depth `d` has `N - d` points, so deduplication only needs the
/// current level. A maximum consensus set `S*` below an infeasible set `x`
/// stays below `x \ {b}` for some basis point `b ∉ S*`, so the search reaches
/// a feasible set no later than depth `N - |S*|`. Among the feasible sets of
/// the first feasible level the one with the smallest bitmask is returned.
pub fn exact_maxcon<O: Oracle + ?Sized>(oracle: &O, limits: ExactLimits) -> Result<SolveReport> {
    if !oracle.supplies_basis() {
        return Err(Error::NoBasis);
    }
    let start = Instant::now();
    let q0 = oracle.queries();
    let n = oracle.universe();
    let max_depth = limits.max_depth.unwrap_or(n).min(n);
    let mut frontier = vec![PointSet::full(n)?];
    let mut explored = 0usize;
    for depth in 0..=max_depth {
        let verdicts = frontier
            .par_iter()
            .map(|&x| oracle.evaluate(x))
            .collect::<Result<Vec<_>>>()?;
        explored += frontier.len();
        if let Some(pos) = verdicts.iter().position(|r| !r.infeasible) {
            let solution = frontier[pos];
            let queries = oracle.queries() - q0;
            return Ok(SolveReport {
                method: Method::Exact,
                solution,
                consensus_size: solution.level(),
                iterations: depth,
                oracle_queries: queries,
                estimation_queries: 0,
                termination_queries: queries,
                expansion_queries: 0,
                removed_sequence: solution.non_members().collect(),
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
        if depth == max_depth {
            break;
        }
        let mut next = Vec::new();
        for (x, r) in frontier.iter().zip(verdicts) {
            for b in r.basis.ok_or(Error::NoBasis)? {
                next.push(x.without(b)?);
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.len() > limits.max_frontier {
            return Err(resource_limit(oracle, depth + 1, explored));
        }
        frontier = next;
    }
    Err(resource_limit(oracle, max_depth, explored))
}

fn resource_limit<O: Oracle + ?Sized>(oracle: &O, depth: usize, nodes: usize) -> Error {
    let order: Vec<usize> = (0..oracle.universe()).collect();
    let partial = greedy_maxcon(oracle, &order).ok().map(Box::new);
    Error::ResourceLimit {
        depth,
        nodes,
        partial,
    }
}

//! Feasibility oracles: monotone Boolean functions over subsets of the data.
//!
//! An oracle maps a [`PointSet`] to `f(x) ∈ {0, 1}` where `0` means the subset
//! can be fit by one model instance within tolerance (feasible) and `1` means
//! it cannot. Feasibility is monotone: supersets of infeasible sets are
//! infeasible. Geometric oracles additionally return a basis, a subset of at
//! most `p + 1` members that is infeasible on its own whenever `x` is.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{PointSet, MAX_ENUMERATION};
use crate::error::{Error, Result};

/// Verdict of one oracle query.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    /// The function value; `false` means feasible.
    pub infeasible: bool,
    /// Indices of a basis of the queried set, when the oracle can produce one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<usize>>,
}

impl FeasibilityResult {
    pub fn feasible() -> Self {
        Self {
            infeasible: false,
            basis: None,
        }
    }

    pub fn infeasible() -> Self {
        Self {
            infeasible: true,
            basis: None,
        }
    }

    pub fn from_value(infeasible: bool) -> Self {
        Self {
            infeasible,
            basis: None,
        }
    }

    /// `f(x)` as 0 or 1.
    pub fn value(&self) -> u8 {
        self.infeasible as u8
    }
}

/// Thread-safe count of oracle evaluations.
#[derive(Debug, Default)]
pub struct QueryCounter(AtomicU64);

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn record(&self) {
        self.0.fetch_add(1, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

/// A monotone feasibility function over subsets of `universe()` points.
///
/// Implementations must be pure in the value of `f` and count every call to
/// [`Oracle::evaluate`] in their query counter.
pub trait Oracle: Sync {
    /// Number of data points `N`.
    fn universe(&self) -> usize;

    /// Combinatorial dimension `p`: every subset of at most `p` points is feasible.
    fn combinatorial_dimension(&self) -> usize;

    fn evaluate(&self, x: PointSet) -> Result<FeasibilityResult>;

    /// Whether infeasible verdicts carry a basis.
    fn supplies_basis(&self) -> bool {
        false
    }

    /// Number of evaluations performed so far.
    fn queries(&self) -> u64;

    fn is_infeasible(&self, x: PointSet) -> Result<bool> {
        Ok(self.evaluate(x)?.infeasible)
    }
}

impl<O: Oracle + ?Sized> Oracle for &O {
    fn universe(&self) -> usize {
        (**self).universe()
    }
    fn combinatorial_dimension(&self) -> usize {
        (**self).combinatorial_dimension()
    }
    fn evaluate(&self, x: PointSet) -> Result<FeasibilityResult> {
        (**self).evaluate(x)
    }
    fn supplies_basis(&self) -> bool {
        (**self).supplies_basis()
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

pub(crate) fn check_universe(x: &PointSet, n: usize) -> Result<()> {
    if x.universe() != n {
        return Err(Error::UniverseMismatch {
            left: x.universe(),
            right: n,
        });
    }
    Ok(())
}

/// Declaration of a synthetic monotone Boolean function by its upper zeros.
///
/// `f(x) = 0` iff `level(x) <= p` or `x` lies below one of the upper zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIdealSpec")]
pub struct IdealSpec {
    n: usize,
    p: usize,
    upper_zeros: Vec<PointSet>,
}

#[derive(Deserialize)]
struct RawIdealSpec {
    n: usize,
    p: usize,
    upper_zeros: Vec<PointSet>,
}

impl TryFrom<RawIdealSpec> for IdealSpec {
    type Error = Error;

    fn try_from(raw: RawIdealSpec) -> Result<Self> {
        IdealSpec::new(raw.n, raw.p, raw.upper_zeros)
    }
}

impl IdealSpec {
    /// Validates and builds a specification. Every upper zero must lie above
    /// level `p`, and no upper zero may lie below another.
    pub fn new(n: usize, p: usize, upper_zeros: Vec<PointSet>) -> Result<Self> {
        if n == 0 || n > crate::cube::MAX_UNIVERSE {
            return Err(Error::InvalidSpec(format!(
                "universe size {n} out of range"
            )));
        }
        if p >= n {
            return Err(Error::InvalidSpec(format!("p = {p} must be below n = {n}")));
        }
        for z in &upper_zeros {
            if z.universe() != n {
                return Err(Error::InvalidSpec(format!(
                    "upper zero {z} does not have length {n}"
                )));
            }
            if z.level() <= p {
                return Err(Error::InvalidSpec(format!(
                    "upper zero {z} has level {} <= p = {p}",
                    z.level()
                )));
            }
        }
        for (a, za) in upper_zeros.iter().enumerate() {
            for (b, zb) in upper_zeros.iter().enumerate() {
                if a != b && za.is_below(zb)? {
                    return Err(Error::InvalidSpec(format!(
                        "upper zero {za} lies below upper zero {zb}"
                    )));
                }
            }
        }
        Ok(Self { n, p, upper_zeros })
    }

    /// Builds a specification from a list of feasible sets, keeping only the
    /// maximal ones (duplicates and dominated sets are dropped).
    pub fn from_maximal_elements(n: usize, p: usize, sets: Vec<PointSet>) -> Result<Self> {
        let mut kept: Vec<PointSet> = Vec::new();
        for (a, za) in sets.iter().enumerate() {
            let dominated = sets.iter().enumerate().any(|(b, zb)| {
                a != b
                    && za.universe() == zb.universe()
                    && za.is_below(zb).unwrap_or(false)
                    && (za != zb || b < a)
            });
            if !dominated {
                kept.push(*za);
            }
        }
        Self::new(n, p, kept)
    }

    /// Parses the JSON form `{"n":7,"p":2,"upper_zeros":["1010111"]}`.
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn upper_zeros(&self) -> &[PointSet] {
        &self.upper_zeros
    }

    /// Ideal iff no two upper-zero shadows share an element above level `p`.
    pub fn is_ideal(&self) -> bool {
        self.pseudo_upper_zeros().is_empty()
    }

    /// Maximal elements of pairwise shadow intersections that rise above
    /// level `p`, in pair order `(0,1), (0,2), .., (1,2), ..`, deduplicated.
    ///
    /// The maximal element of the intersection of two shadows is the bitwise
    /// AND of their apexes, so only pairs are inspected.
    pub fn pseudo_upper_zeros(&self) -> Vec<PointSet> {
        let mut out: Vec<PointSet> = Vec::new();
        for (a, za) in self.upper_zeros.iter().enumerate() {
            for zb in &self.upper_zeros[a + 1..] {
                let meet = za.intersection(zb).expect("validated universe");
                if meet.level() > self.p && !out.contains(&meet) {
                    out.push(meet);
                }
            }
        }
        out
    }

    /// `f(x)` without touching any query counter.
    pub fn value(&self, x: PointSet) -> bool {
        if x.level() <= self.p {
            return false;
        }
        !self.upper_zeros.iter().any(|z| x.bits() & !z.bits() == 0)
    }
}

/// Free-function form of [`IdealSpec::pseudo_upper_zeros`].
pub fn pseudo_upper_zeros(spec: &IdealSpec) -> Vec<PointSet> {
    spec.pseudo_upper_zeros()
}

/// Identifiers of the built-in worked examples.
pub const BUILTIN_IDS: [&str; 4] = ["ex1", "ex2", "ex3", "ex4"];

/// The four worked examples: a single structure, two and three disjoint
/// structures, and three overlapping structures.
pub fn builtin(id: &str) -> Option<IdealSpec> {
    let (n, p, zeros): (usize, usize, &[&str]) = match id {
        "ex1" => (7, 2, &["1010111"]),
        "ex2" => (9, 2, &["111100000", "001001111"]),
        "ex3" => (8, 2, &["10010100", "11110000", "01011101"]),
        "ex4" => (8, 2, &["11001100", "10101110", "10110110"]),
        _ => return None,
    };
    let zeros = zeros.iter().map(|s| s.parse().expect("literal")).collect();
    Some(IdealSpec::new(n, p, zeros).expect("built-in spec is valid"))
}

/// Oracle evaluating an [`IdealSpec`]. Never returns a basis.
#[derive(Debug)]
pub struct SyntheticOracle {
    spec: IdealSpec,
    counter: QueryCounter,
}

impl SyntheticOracle {
    pub fn new(spec: IdealSpec) -> Self {
        Self {
            spec,
            counter: QueryCounter::new(),
        }
    }

    pub fn spec(&self) -> &IdealSpec {
        &self.spec
    }
}

impl Oracle for SyntheticOracle {
    fn universe(&self) -> usize {
        self.spec.n
    }

    fn combinatorial_dimension(&self) -> usize {
        self.spec.p
    }

    fn evaluate(&self, x: PointSet) -> Result<FeasibilityResult> {
        check_universe(&x, self.spec.n)?;
        self.counter.record();
        Ok(FeasibilityResult::from_value(self.spec.value(x)))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// Evaluates a synthetic specification; the basis is always absent.
pub fn eval_synthetic(spec: &IdealSpec, x: PointSet) -> Result<FeasibilityResult> {
    check_universe(&x, spec.n)?;
    Ok(FeasibilityResult::from_value(spec.value(x)))
}

/// Oracle backed by an arbitrary predicate returning `true` for infeasible sets.
pub struct FnOracle<F> {
    n: usize,
    p: usize,
    f: F,
    counter: QueryCounter,
}

impl<F: Fn(PointSet) -> bool + Sync> FnOracle<F> {
    pub fn new(n: usize, p: usize, f: F) -> Self {
        Self {
            n,
            p,
            f,
            counter: QueryCounter::new(),
        }
    }
}

impl<F: Fn(PointSet) -> bool + Sync> Oracle for FnOracle<F> {
    fn universe(&self) -> usize {
        self.n
    }

    fn combinatorial_dimension(&self) -> usize {
        self.p
    }

    fn evaluate(&self, x: PointSet) -> Result<FeasibilityResult> {
        check_universe(&x, self.n)?;
        self.counter.record();
        Ok(FeasibilityResult::from_value((self.f)(x)))
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

/// Supplies a basis for oracles that cannot produce one.
///
/// For an infeasible `x` the basis is a minimal infeasible subset found by
/// visiting members in ascending order and dropping each one whose removal
/// keeps the remainder infeasible. Its size is at least `p + 1`, and exactly
/// `p + 1` when the function is determined by its level-`(p + 1)` slice.
/// The extra evaluations are charged to the wrapped oracle.
pub struct BasisEmulator<O> {
    inner: O,
}

impl<O: Oracle> BasisEmulator<O> {
    pub fn new(inner: O) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Oracle> Oracle for BasisEmulator<O> {
    fn universe(&self) -> usize {
        self.inner.universe()
    }

    fn combinatorial_dimension(&self) -> usize {
        self.inner.combinatorial_dimension()
    }

    fn evaluate(&self, x: PointSet) -> Result<FeasibilityResult> {
        let res = self.inner.evaluate(x)?;
        if !res.infeasible || res.basis.is_some() {
            return Ok(res);
        }
        let mut core = x;
        for i in x.members() {
            let smaller = core.without(i)?;
            if self.inner.is_infeasible(smaller)? {
                core = smaller;
            }
        }
        Ok(FeasibilityResult {
            infeasible: true,
            basis: Some(core.members().collect()),
        })
    }

    fn supplies_basis(&self) -> bool {
        true
    }

    fn queries(&self) -> u64 {
        self.inner.queries()
    }
}

/// Evaluates `f` on every vertex of the cube, indexed by bitmask.
pub fn truth_table<O: Oracle + ?Sized>(oracle: &O, n: usize) -> Result<Vec<bool>> {
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    (0u64..(1u64 << n))
        .into_par_iter()
        .map(|bits| oracle.is_infeasible(PointSet::from_bits(bits, n)?))
        .collect()
}

/// Strategy for [`check_monotone`].
#[derive(Clone, Copy, Debug)]
pub enum MonotoneCheck {
    /// Scan every edge of the cube (`n <= 20`).
    Exhaustive,
    /// Walk random maximal chains from the empty set to the full set.
    SampledChains { chains: usize, seed: u64 },
}

/// Largest universe accepted by the exhaustive monotonicity scan.
pub const MAX_EXHAUSTIVE_MONOTONE: usize = 20;

/// Returns `false` iff some edge `x -> x ∪ {i}` has `f` decreasing upward.
pub fn check_monotone<O: Oracle + ?Sized>(
    oracle: &O,
    n: usize,
    mode: MonotoneCheck,
) -> Result<bool> {
    match mode {
        MonotoneCheck::Exhaustive => {
            if n > MAX_EXHAUSTIVE_MONOTONE {
                return Err(Error::EnumerationTooLarge {
                    n,
                    max: MAX_EXHAUSTIVE_MONOTONE,
                });
            }
            let table = truth_table(oracle, n)?;
            let ok = (0usize..table.len())
                .into_par_iter()
                .all(|x| !table[x] || (0..n).all(|i| table[x | (1 << i)]));
            Ok(ok)
        }
        MonotoneCheck::SampledChains { chains, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..n).collect();
            for _ in 0..chains {
                order.shuffle(&mut rng);
                let mut x = PointSet::empty(n)?;
                let mut prev = oracle.is_infeasible(x)?;
                for &i in &order {
                    x = x.with(i)?;
                    let cur = oracle.is_infeasible(x)?;
                    if prev && !cur {
                        return Ok(false);
                    }
                    prev = cur;
                }
            }
            Ok(true)
        }
    }
}

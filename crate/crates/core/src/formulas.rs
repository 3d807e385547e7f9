//! Closed-form influences of ideal and non-ideal multi-structure functions.
//!
//! Every data point belongs to a *cell*: for each upper zero, whether the
//! point is an inlier to it, and for each pseudo upper zero, whether the
//! point lies *outside* it. All points in a cell share one influence, which
//! depends only on `N`, `p` and the levels of the (pseudo) upper zeros.
//! Values are on the edge-count scale `2^N · f̂` and computed in exact
//! integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::cube::PointSet;
use crate::error::{Error, Result};
use crate::influence::{exact_influences, InfluenceVector};
use crate::oracle::{IdealSpec, SyntheticOracle};

/// `n choose k`, zero when `k > n`. Pascal recurrence with overflow checks.
pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = row[j].checked_add(row[j - 1]).ok_or(Error::Overflow)?;
        }
    }
    Ok(row[k])
}

fn binom_i(n: usize, k: usize) -> Result<i128> {
    i128::try_from(binomial(n, k)?).map_err(|_| Error::Overflow)
}

/// `Σ_{l=p+1}^{k} C(k, l)`; empty (zero) when `k <= p`.
pub fn upper_tail(k: usize, p: usize) -> Result<i128> {
    let mut s = 0i128;
    for l in p + 1..=k {
        s = s.checked_add(binom_i(k, l)?).ok_or(Error::Overflow)?;
    }
    Ok(s)
}

/// Scaled influences of inliers and outliers for a single structure of size
/// `k` in a universe of `n` points: `C(n-1,p) - C(k-1,p)` and
/// `C(n-1,p) + Σ_{l=p+1}^{k} C(k,l)`.
pub fn influence_single(n: usize, p: usize, k: usize) -> Result<(i128, i128)> {
    if !(p < k && k <= n) {
        return Err(Error::InvalidSizes(format!(
            "need p < k <= n, got n={n} p={p} k={k}"
        )));
    }
    let base = binom_i(n - 1, p)?;
    let inlier = base - binom_i(k - 1, p)?;
    let outlier = base + upper_tail(k, p)?;
    Ok((inlier, outlier))
}

/// Levels describing a multi-structure function.
///
/// `ks[a]` is the level of upper zero `a` and `alphas[b]` the level of
/// pseudo upper zero `b`, in the same order as the bits of a [`CellPattern`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureSizes {
    pub n: usize,
    pub p: usize,
    pub ks: Vec<usize>,
    pub alphas: Vec<usize>,
}

impl StructureSizes {
    pub fn new(n: usize, p: usize, ks: Vec<usize>, alphas: Vec<usize>) -> Result<Self> {
        if ks.is_empty() {
            return Err(Error::InvalidSizes(
                "at least one upper zero required".into(),
            ));
        }
        for &k in &ks {
            if !(p < k && k <= n) {
                return Err(Error::InvalidSizes(format!(
                    "upper-zero level {k} outside (p, n] = ({p}, {n}]"
                )));
            }
        }
        let kmax = *ks.iter().max().expect("non-empty");
        for &a in &alphas {
            if !(p < a && a < kmax) {
                return Err(Error::InvalidSizes(format!(
                    "pseudo upper-zero level {a} outside (p, max k) = ({p}, {kmax})"
                )));
            }
        }
        Ok(Self { n, p, ks, alphas })
    }

    /// Levels read off a specification, in upper-zero order.
    pub fn from_spec(spec: &IdealSpec) -> Self {
        Self {
            n: spec.n(),
            p: spec.p(),
            ks: spec.upper_zeros().iter().map(PointSet::level).collect(),
            alphas: spec
                .pseudo_upper_zeros()
                .iter()
                .map(PointSet::level)
                .collect(),
        }
    }

    /// Same levels with the pseudo upper zeros dropped.
    pub fn without_pseudo(&self) -> Self {
        Self {
            alphas: Vec::new(),
            ..self.clone()
        }
    }
}

/// Cell label `j_1 … j_{K+M}`.
///
/// For the first `K` positions `1` means inlier to that upper zero; for the
/// last `M` positions `1` means *not* below that pseudo upper zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellPattern {
    bits: Vec<bool>,
    k: usize,
}

impl CellPattern {
    pub fn new(bits: Vec<bool>, k: usize) -> Result<Self> {
        if k == 0 || k > bits.len() {
            return Err(Error::InvalidSizes(format!(
                "pattern of length {} cannot hold K = {k}",
                bits.len()
            )));
        }
        Ok(Self { bits, k })
    }

    /// Parses `"11100"` with the first `k` characters as structure bits.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::Parse(format!("invalid cell pattern {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits, k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.bits.len() - self.k
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn structure_bits(&self) -> &[bool] {
        &self.bits[..self.k]
    }

    pub fn pseudo_bits(&self) -> &[bool] {
        &self.bits[self.k..]
    }

    /// Componentwise `self >= other` with at least one strict position.
    pub fn dominates(&self, other: &Self) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits != other.bits
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for CellPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for CellPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellPattern({self})")
    }
}

impl Serialize for CellPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Scaled influence shared by every point of a cell:
///
/// `C(N-1,p) + Σ_{j_a=0} Σ_{l>p} C(k_a,l) - Σ_{j_a=1} C(k_a-1,p)
///  + Σ_{j_b=0} C(α_b-1,p) - Σ_{j_b=1} Σ_{l>p} C(α_b,l)`.
///
/// With no pseudo upper zeros this is the ideal K-structure formula.
pub fn influence_cell(sizes: &StructureSizes, pattern: &CellPattern) -> Result<i128> {
    if pattern.k() != sizes.ks.len() || pattern.m() != sizes.alphas.len() {
        return Err(Error::InvalidSizes(format!(
            "pattern {pattern} has K={} M={} but sizes have K={} M={}",
            pattern.k(),
            pattern.m(),
            sizes.ks.len(),
            sizes.alphas.len()
        )));
    }
    let p = sizes.p;
    let mut v = binom_i(sizes.n - 1, p)?;
    for (&inlier, &k) in pattern.structure_bits().iter().zip(&sizes.ks) {
        if inlier {
            v -= binom_i(k - 1, p)?;
        } else {
            v += upper_tail(k, p)?;
        }
    }
    for (&outside, &a) in pattern.pseudo_bits().iter().zip(&sizes.alphas) {
        if outside {
            v -= upper_tail(a, p)?;
        } else {
            v += binom_i(a - 1, p)?;
        }
    }
    Ok(v)
}

/// Cell of point `i`: its bit in each upper zero, then the complement of its
/// bit in each pseudo upper zero.
pub fn cell_of_point(spec: &IdealSpec, i: usize) -> Result<CellPattern> {
    cell_with(spec, &spec.pseudo_upper_zeros(), i)
}

fn cell_with(spec: &IdealSpec, pseudo: &[PointSet], i: usize) -> Result<CellPattern> {
    if i >= spec.n() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: spec.n(),
        });
    }
    let bits = spec
        .upper_zeros()
        .iter()
        .map(|z| z.contains(i))
        .chain(pseudo.iter().map(|a| !a.contains(i)))
        .collect();
    CellPattern::new(bits, spec.upper_zeros().len())
}

/// Non-empty cells of a specification with their closed-form influences.
pub fn cell_values(spec: &IdealSpec) -> Result<BTreeMap<CellPattern, i128>> {
    let sizes = StructureSizes::from_spec(spec);
    let pseudo = spec.pseudo_upper_zeros();
    let mut out = BTreeMap::new();
    for i in 0..spec.n() {
        let cell = cell_with(spec, &pseudo, i)?;
        if let std::collections::btree_map::Entry::Vacant(e) = out.entry(cell) {
            let v = influence_cell(&sizes, e.key())?;
            e.insert(v);
        }
    }
    Ok(out)
}

/// Checks the ordering corollaries over the given (non-empty) cells:
/// a dominating cell has strictly smaller influence, and for two upper
/// zeros without pseudo upper zeros `f(11) + f(00) = f(10) + f(01)`.
pub fn verify_ordering(sizes: &StructureSizes, cells: &[CellPattern]) -> Result<bool> {
    let values = cells
        .iter()
        .map(|c| influence_cell(sizes, c))
        .collect::<Result<Vec<_>>>()?;
    for (a, va) in cells.iter().zip(&values) {
        for (b, vb) in cells.iter().zip(&values) {
            if a.dominates(b) && va >= vb {
                return Ok(false);
            }
        }
    }
    if sizes.ks.len() == 2 && sizes.alphas.is_empty() {
        let v = |s: &str| influence_cell(sizes, &CellPattern::parse(s, 2)?);
        if v("11")? + v("00")? != v("10")? + v("01")? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff every non-empty cell that is outlier to all structures has a
/// larger influence than every non-empty cell that is inlier to some
/// structure.
pub fn outliers_dominate(values: &BTreeMap<CellPattern, i128>) -> bool {
    let (outl, inl): (Vec<_>, Vec<_>) = values
        .iter()
        .partition(|(c, _)| c.structure_bits().iter().all(|b| !b));
    let min_out = outl.iter().map(|(_, &v)| v).min();
    let max_in = inl.iter().map(|(_, &v)| v).max();
    match (min_out, max_in) {
        (Some(o), Some(i)) => o > i,
        _ => true,
    }
}

/// Whether pseudo upper zeros enter the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Use the pseudo upper zeros derived from the specification.
    Auto,
    /// Treat the specification as ideal and ignore overlaps.
    AssumeIdeal,
}

/// One row of a verification report.
#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub cell: CellPattern,
    pub formula: i128,
    pub enumeration: u64,
    #[serde(rename = "match")]
    pub matched: bool,
}

/// Closed-form versus enumerated influences for every point of a specification.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub spec: IdealSpec,
    pub ideal: bool,
    pub pseudo_upper_zeros: Vec<PointSet>,
    pub points: Vec<PointReport>,
    pub ordering_holds: bool,
    pub all_match: bool,
}

/// Compares closed-form cell influences with cube enumeration.
pub fn verify_spec(spec: &IdealSpec, mode: VerifyMode) -> Result<VerifyReport> {
    let pseudo = match mode {
        VerifyMode::Auto => spec.pseudo_upper_zeros(),
        VerifyMode::AssumeIdeal => Vec::new(),
    };
    let sizes = StructureSizes {
        n: spec.n(),
        p: spec.p(),
        ks: spec.upper_zeros().iter().map(PointSet::level).collect(),
        alphas: pseudo.iter().map(PointSet::level).collect(),
    };
    let oracle = SyntheticOracle::new(spec.clone());
    let InfluenceVector::Exact { values } = exact_influences(&oracle, spec.n())? else {
        unreachable!("exact mode")
    };
    let mut points = Vec::with_capacity(spec.n());
    let mut cells = Vec::new();
    for (i, &enumeration) in values.iter().enumerate() {
        let cell = cell_with(spec, &pseudo, i)?;
        let formula = influence_cell(&sizes, &cell)?;
        if !cells.contains(&cell) {
            cells.push(cell.clone());
        }
        points.push(PointReport {
            index: i,
            cell,
            formula,
            enumeration,
            matched: formula == enumeration as i128,
        });
    }
    let all_match = points.iter().all(|r| r.matched);
    Ok(VerifyReport {
        spec: spec.clone(),
        ideal: spec.is_ideal(),
        pseudo_upper_zeros: pseudo,
        ordering_holds: verify_ordering(&sizes, &cells)?,
        points,
        all_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::builtin;

    fn cell(s: &str, k: usize) -> CellPattern {
        CellPattern::parse(s, k).unwrap()
    }

    #[test]
    fn binomial_convention() {
        assert_eq!(binomial(6, 2).unwrap(), 15);
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(3, 5).unwrap(), 0);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(64, 32).unwrap(), 1_832_624_140_942_590_534);
        assert_eq!(
            binomial(130, 65).unwrap(),
            95_067_625_827_960_698_145_584_333_020_095_113_100
        );
        assert!(matches!(binomial(140, 70), Err(Error::Overflow)));
    }

    #[test]
    fn upper_tail_empty_sum() {
        assert_eq!(upper_tail(2, 2).unwrap(), 0);
        assert_eq!(upper_tail(5, 2).unwrap(), 10 + 5 + 1);
    }

    #[test]
    fn single_structure_examples() {
        assert_eq!(influence_single(7, 2, 5).unwrap(), (9, 31));
        assert_eq!(influence_single(9, 3, 9).unwrap().0, 0);
        assert!(influence_single(7, 2, 2).is_err());
        assert!(influence_single(7, 2, 8).is_err());
    }

    #[test]
    fn single_structure_matches_enumeration() {
        let zero: PointSet = "1101101100".parse().unwrap();
        let spec = IdealSpec::new(10, 2, vec![zero]).unwrap();
        let o = SyntheticOracle::new(spec);
        let v = exact_influences(&o, 10).unwrap();
        let (inl, outl) = influence_single(10, 2, 6).unwrap();
        for i in 0..10 {
            let expect = if zero.contains(i) { inl } else { outl };
            assert_eq!(v.get(i).unwrap() as i128, expect);
        }
    }

    #[test]
    fn single_equals_cell_with_one_structure() {
        for (n, p, k) in [(7, 2, 5), (12, 3, 8), (20, 1, 19), (9, 4, 9)] {
            let sizes = StructureSizes::new(n, p, vec![k], vec![]).unwrap();
            let (inl, outl) = influence_single(n, p, k).unwrap();
            assert_eq!(influence_cell(&sizes, &cell("1", 1)).unwrap(), inl);
            assert_eq!(influence_cell(&sizes, &cell("0", 1)).unwrap(), outl);
        }
    }

    #[test]
    fn two_structure_example() {
        let s = StructureSizes::new(9, 2, vec![4, 5], vec![]).unwrap();
        let v = |c: &str| influence_cell(&s, &cell(c, 2)).unwrap();
        assert_eq!((v("11"), v("10"), v("01"), v("00")), (19, 41, 27, 49));
    }

    #[test]
    fn three_structure_example() {
        let s = StructureSizes::new(8, 2, vec![3, 4, 5], vec![]).unwrap();
        let v = |c: &str| influence_cell(&s, &cell(c, 3)).unwrap();
        assert_eq!(v("000"), 43);
        assert_eq!(v("111"), 11);
        assert_eq!(v("011"), 13);
        assert_eq!(v("101"), 19);
        assert_eq!(v("110"), 33);
        assert_eq!(v("001"), 21);
        assert_eq!(v("010"), 35);
    }

    #[test]
    fn non_ideal_example() {
        let s = StructureSizes::new(8, 2, vec![4, 5, 5], vec![3, 4]).unwrap();
        let v = |c: &str| influence_cell(&s, &cell(c, 3)).unwrap();
        assert_eq!(v("11100"), 10);
        assert_eq!(v("00011"), 52);
        assert_eq!(v("01110"), 16);
        assert_eq!(v("11001"), 24);
        assert_eq!(v("00111"), 30);
        assert_eq!(v("10011"), 44);
    }

    #[test]
    fn pattern_length_checked() {
        let s = StructureSizes::new(8, 2, vec![4, 5, 5], vec![3, 4]).unwrap();
        assert!(influence_cell(&s, &cell("111", 3)).is_err());
        assert!(influence_cell(&s, &cell("1110000", 3)).is_err());
        assert!(CellPattern::parse("1x1", 1).is_err());
        assert!(StructureSizes::new(8, 2, vec![2], vec![]).is_err());
        assert!(StructureSizes::new(8, 2, vec![5], vec![5]).is_err());
    }

    #[test]
    fn cells_of_points() {
        let ex2 = builtin("ex2").unwrap();
        assert_eq!(cell_of_point(&ex2, 2).unwrap(), cell("11", 2));
        assert_eq!(cell_of_point(&ex2, 4).unwrap(), cell("00", 2));
        let ex4 = builtin("ex4").unwrap();
        let c7 = cell_of_point(&ex4, 7).unwrap();
        assert_eq!(c7, cell("00011", 3));
        let sizes = StructureSizes::from_spec(&ex4);
        assert_eq!(influence_cell(&sizes, &c7).unwrap(), 52);
        assert!(cell_of_point(&ex4, 8).is_err());
    }

    #[test]
    fn ordering_examples() {
        let s3 = StructureSizes::new(8, 2, vec![3, 4, 5], vec![]).unwrap();
        let cells: Vec<_> = ["111", "011", "101", "110", "001", "010", "000"]
            .iter()
            .map(|c| cell(c, 3))
            .collect();
        assert!(verify_ordering(&s3, &cells).unwrap());
        let s2 = StructureSizes::new(9, 2, vec![4, 5], vec![]).unwrap();
        let cells2: Vec<_> = ["11", "10", "01", "00"]
            .iter()
            .map(|c| cell(c, 2))
            .collect();
        assert!(verify_ordering(&s2, &cells2).unwrap());
    }

    #[test]
    fn single_structure_inlier_below_outlier_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let n = rng.gen_range(3..=60);
            let p = rng.gen_range(0..n - 1);
            let k = rng.gen_range(p + 1..=n);
            let s = StructureSizes::new(n, p, vec![k], vec![]).unwrap();
            assert!(verify_ordering(&s, &[cell("1", 1), cell("0", 1)]).unwrap());
            let (inl, outl) = influence_single(n, p, k).unwrap();
            assert!(outl > inl);
        }
    }

    #[test]
    fn verify_reports_match_on_builtins() {
        for id in crate::oracle::BUILTIN_IDS {
            let r = verify_spec(&builtin(id).unwrap(), VerifyMode::Auto).unwrap();
            assert!(r.all_match, "{id}");
            assert!(r.ordering_holds, "{id}");
        }
    }

    #[test]
    fn assuming_ideal_on_overlapping_spec_reports_mismatch() {
        let r = verify_spec(&builtin("ex4").unwrap(), VerifyMode::AssumeIdeal).unwrap();
        assert!(!r.all_match);
        assert!(r.points.iter().any(|p| !p.matched));
    }

    #[test]
    fn report_json_shape() {
        let r = verify_spec(&builtin("ex1").unwrap(), VerifyMode::Auto).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["spec"]["upper_zeros"][0], "1010111");
        assert_eq!(v["points"][1]["cell"], "0");
        assert_eq!(v["points"][1]["formula"], 31);
        assert_eq!(v["points"][1]["enumeration"], 31);
        assert_eq!(v["points"][1]["match"], true);
    }
}

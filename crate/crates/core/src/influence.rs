//! Exact and sampled influences of data points.
//!
//! For a monotone feasibility function the influence of point `i` is the
//! degree-1 Fourier coefficient `f̂({i})`; scaled by `2^N` it is the number of
//! cube edges in direction `i` whose endpoints take different values.
//!
//! Exact vectors are reported on that edge-count scale. Sampled vectors are
//! reported on the `f̂` scale, i.e. divided by the query budget `m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{PointSet, MAX_ENUMERATION};
use crate::error::{Error, Result};
use crate::oracle::{truth_table, Oracle};

/// Per-point influences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum InfluenceVector {
    /// Boundary-edge counts, `2^N · f̂({i})`.
    Exact { values: Vec<u64> },
    /// Estimates of `f̂({i})`; `None` for points that were not candidates.
    Sampled { m: usize, values: Vec<Option<f64>> },
}

impl InfluenceVector {
    pub fn n(&self) -> usize {
        match self {
            Self::Exact { values } => values.len(),
            Self::Sampled { values, .. } => values.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Exact { .. })
    }

    /// Value of point `i` on the vector's native scale.
    pub fn get(&self, i: usize) -> Option<f64> {
        match self {
            Self::Exact { values } => values.get(i).map(|&v| v as f64),
            Self::Sampled { values, .. } => values.get(i).copied().flatten(),
        }
    }

    /// Value of point `i` on the `f̂` scale.
    pub fn fourier(&self, i: usize) -> Option<f64> {
        match self {
            Self::Exact { values } => values
                .get(i)
                .map(|&v| v as f64 / (values.len() as f64).exp2()),
            Self::Sampled { .. } => self.get(i),
        }
    }

    /// Value of point `i` on the edge-count scale `2^N · f̂`.
    pub fn edge_count(&self, i: usize) -> Option<f64> {
        match self {
            Self::Exact { .. } => self.get(i),
            Self::Sampled { values, .. } => self.get(i).map(|v| v * (values.len() as f64).exp2()),
        }
    }

    /// Index of the largest defined value; ties go to the lowest index.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.n() {
            if let Some(v) = self.get(i) {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((i, v));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("influence vector serializes")
    }
}

/// Sum of per-point influences on the vector's native scale.
pub fn total_influence(vec: &InfluenceVector) -> f64 {
    (0..vec.n()).filter_map(|i| vec.get(i)).sum()
}

/// Query budget and sampling measure for one round of estimation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    m: usize,
    q: f64,
    seed: u64,
}

/// Default per-iteration query budget.
pub const DEFAULT_M: usize = 500;

impl SampleBudget {
    /// `m` must be even and at least 2; `q` must lie strictly inside `(0, 1)`.
    pub fn new(m: usize, q: f64, seed: u64) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidBudget(format!(
                "m = {m} must be even and >= 2"
            )));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidBudget(format!("q = {q} must lie in (0, 1)")));
        }
        Ok(Self { m, q, seed })
    }

    /// Budget with `q = (p + 3) / n`, concentrating samples near level `p + 3`.
    pub fn with_default_q(m: usize, p: usize, n: usize, seed: u64) -> Result<Self> {
        Self::new(m, default_q(p, n), seed)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// `(p + 3) / n`, clamped to `[1/(2n), 1 - 1/(2n)]`.
pub fn default_q(p: usize, n: usize) -> f64 {
    let n = n.max(1) as f64;
    let lo = 0.5 / n;
    ((p as f64 + 3.0) / n).clamp(lo, 1.0 - lo)
}

/// Knobs for [`sample_influences_with`].
#[derive(Clone, Copy, Debug)]
pub struct SampleOptions {
    /// Stream index of this estimation round; rounds draw independent samples.
    pub iteration: u64,
    /// Skip evaluations whose value monotonicity already determines.
    pub monotone_shortcut: bool,
}

impl Default for SampleOptions {
    fn default() -> Self {
        Self {
            iteration: 0,
            monotone_shortcut: true,
        }
    }
}

// Each sample consumes at most 64 `f64` draws, two ChaCha words apiece.
const WORDS_PER_SAMPLE: u128 = 128;

/// The `j`-th base vertex of round `iteration`: each bit is set with
/// probability `q`. Depends only on `(seed, iteration, j)`.
pub fn base_vertex(n: usize, q: f64, seed: u64, iteration: u64, j: usize) -> Result<PointSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    rng.set_word_pos(j as u128 * WORDS_PER_SAMPLE);
    let mut bits = 0u64;
    for i in 0..n {
        if rng.gen::<f64>() < q {
            bits |= 1 << i;
        }
    }
    PointSet::from_bits(bits, n)
}

/// Estimates `f̂({i})` for every candidate with the default options.
pub fn sample_influences<O: Oracle + ?Sized>(
    oracle: &O,
    candidates: &[usize],
    budget: &SampleBudget,
) -> Result<InfluenceVector> {
    sample_influences_with(oracle, candidates, budget, SampleOptions::default())
}

/// Estimates `f̂({i})` for every candidate from `m/2` shared base vertices.
///
/// Each base vertex `x` is paired with `x` flipped at `i`, and the pair
/// contributes `f(x ∪ {i}) - f(x \ {i})`. The estimate is the sum over
/// pairs divided by `m`. Contributions are integers, so the result does not
/// depend on evaluation order.
pub fn sample_influences_with<O: Oracle + ?Sized>(
    oracle: &O,
    candidates: &[usize],
    budget: &SampleBudget,
    options: SampleOptions,
) -> Result<InfluenceVector> {
    let n = oracle.universe();
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if let Some(&bad) = candidates.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let half = budget.m / 2;
    let sums = (0..half)
        .into_par_iter()
        .map(|j| -> Result<Vec<i64>> {
            let x = base_vertex(n, budget.q, budget.seed, options.iteration, j)?;
            let fx = oracle.is_infeasible(x)?;
            candidates
                .iter()
                .map(|&i| {
                    let included = x.contains(i);
                    let determined = options.monotone_shortcut && (fx != included);
                    let fy = if determined {
                        fx
                    } else {
                        oracle.is_infeasible(x.flip(i)?)?
                    };
                    let (top, bottom) = if included { (fx, fy) } else { (fy, fx) };
                    Ok(top as i64 - bottom as i64)
                })
                .collect()
        })
        .try_reduce(
            || vec![0i64; candidates.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let mut values = vec![None; n];
    for (&i, s) in candidates.iter().zip(sums) {
        values[i] = Some(s as f64 / budget.m as f64);
    }
    Ok(InfluenceVector::Sampled {
        m: budget.m,
        values,
    })
}

/// Counts, for every direction `i`, the cube edges whose endpoints differ
/// under `f`. Requires `n <= 25`.
pub fn exact_influences<O: Oracle + ?Sized>(oracle: &O, n: usize) -> Result<InfluenceVector> {
    if n > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    let table = truth_table(oracle, n)?;
    Ok(InfluenceVector::Exact {
        values: boundary_counts(&table, n),
    })
}

/// Boundary-edge counts of a truth table indexed by bitmask.
pub fn boundary_counts(table: &[bool], n: usize) -> Vec<u64> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let bit = 1usize << i;
            (0..table.len())
                .filter(|x| x & bit == 0 && table[*x] != table[x | bit])
                .count() as u64
        })
        .collect()
}

/// Fourier coefficient `f̂(S) = 2^-n Σ_x f(x) (-1)^{|x ∩ S|}` of a truth
/// table, scaled by `2^n` so the result is an exact integer.
///
/// With this character convention the degree-1 coefficient of a monotone
/// function is the negated influence.
pub fn scaled_fourier_coefficient(table: &[bool], set: u64) -> i64 {
    table
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(x, _)| {
            if (x as u64 & set).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            }
        })
        .sum()
}

/// Truth table of the restriction of `table` to sets excluding point `r`,
/// re-indexed over the remaining `n - 1` points in ascending order.
pub fn restrict_excluding(table: &[bool], n: usize, r: usize) -> Vec<bool> {
    let low = (1usize << r) - 1;
    (0..1usize << (n - 1))
        .map(|y| {
            let x = (y & low) | ((y & !low) << 1);
            table[x]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{builtin, FnOracle, IdealSpec, SyntheticOracle};

    fn exact(id: &str) -> Vec<u64> {
        let spec = builtin(id).unwrap();
        let oracle = SyntheticOracle::new(spec.clone());
        match exact_influences(&oracle, spec.n()).unwrap() {
            InfluenceVector::Exact { values } => values,
            _ => unreachable!(),
        }
    }

    #[test]
    fn exact_influences_match_worked_examples() {
        assert_eq!(exact("ex1"), vec![9, 31, 9, 31, 9, 9, 9]);
        assert_eq!(exact("ex2"), vec![41, 41, 19, 41, 49, 27, 27, 27, 27]);
        assert_eq!(exact("ex3"), vec![33, 13, 35, 11, 21, 19, 43, 21]);
        assert_eq!(exact("ex4"), vec![10, 44, 16, 30, 24, 10, 16, 52]);
    }

    #[test]
    fn exact_rejects_large_universe() {
        let oracle = FnOracle::new(26, 1, |_| false);
        assert!(matches!(
            exact_influences(&oracle, 26),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn total_influence_examples() {
        let v = InfluenceVector::Exact {
            values: exact("ex1"),
        };
        assert_eq!(total_influence(&v), 107.0);
        assert_eq!(
            total_influence(&InfluenceVector::Exact { values: vec![0; 5] }),
            0.0
        );
        let v3 = InfluenceVector::Exact {
            values: exact("ex3"),
        };
        assert_eq!(total_influence(&v3), 196.0);
    }

    #[test]
    fn json_form() {
        let v = InfluenceVector::Exact {
            values: exact("ex1"),
        };
        assert_eq!(
            v.to_json(),
            r#"{"mode":"exact","values":[9,31,9,31,9,9,9]}"#
        );
        let back: InfluenceVector = serde_json::from_str(&v.to_json()).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn scale_conversions() {
        let v = InfluenceVector::Exact {
            values: exact("ex1"),
        };
        assert_eq!(v.fourier(1), Some(31.0 / 128.0));
        assert_eq!(v.edge_count(1), Some(31.0));
        let s = InfluenceVector::Sampled {
            m: 4,
            values: vec![Some(0.25), None],
        };
        assert_eq!(s.edge_count(0), Some(1.0));
        assert_eq!(s.fourier(1), None);
        assert_eq!(v.argmax(), Some(1));
    }

    #[test]
    fn budget_validation() {
        assert!(SampleBudget::new(1, 0.5, 0).is_err());
        assert!(SampleBudget::new(3, 0.5, 0).is_err());
        assert!(SampleBudget::new(2, 0.0, 0).is_err());
        assert!(SampleBudget::new(2, 1.0, 0).is_err());
        assert!(SampleBudget::new(2, 0.5, 0).is_ok());
        assert_eq!(default_q(2, 7), 5.0 / 7.0);
        assert!(default_q(8, 9) < 1.0);
    }

    #[test]
    fn empty_candidates_rejected() {
        let oracle = SyntheticOracle::new(builtin("ex1").unwrap());
        let b = SampleBudget::new(10, 0.5, 0).unwrap();
        assert!(matches!(
            sample_influences(&oracle, &[], &b),
            Err(Error::EmptyCandidates)
        ));
        assert!(sample_influences(&oracle, &[7], &b).is_err());
    }

    #[test]
    fn constant_feasible_oracle_has_zero_estimates() {
        let spec = IdealSpec::new(7, 2, vec![PointSet::full(7).unwrap()]).unwrap();
        let oracle = SyntheticOracle::new(spec);
        let b = SampleBudget::new(200, 0.5, 11).unwrap();
        let v = sample_influences(&oracle, &[0, 1, 2, 3, 4, 5, 6], &b).unwrap();
        for i in 0..7 {
            assert_eq!(v.get(i), Some(0.0));
        }
    }

    #[test]
    fn non_candidates_are_absent_and_costs_are_bounded() {
        let oracle = SyntheticOracle::new(builtin("ex1").unwrap());
        let b = SampleBudget::new(100, 5.0 / 7.0, 1).unwrap();
        let v = sample_influences(&oracle, &[1, 4], &b).unwrap();
        assert!(v.get(0).is_none() && v.get(1).is_some() && v.get(4).is_some());
        assert!(oracle.queries() <= 50 * 3);
        assert!(oracle.queries() >= 50);
    }

    #[test]
    fn shortcut_never_changes_estimates() {
        let spec = builtin("ex4").unwrap();
        let cands: Vec<usize> = (0..8).collect();
        for seed in 0..20 {
            let b = SampleBudget::new(60, 0.6, seed).unwrap();
            let with = SyntheticOracle::new(spec.clone());
            let without = SyntheticOracle::new(spec.clone());
            let opts = SampleOptions {
                iteration: 3,
                monotone_shortcut: true,
            };
            let a = sample_influences_with(&with, &cands, &b, opts).unwrap();
            let c = sample_influences_with(
                &without,
                &cands,
                &b,
                SampleOptions {
                    monotone_shortcut: false,
                    ..opts
                },
            )
            .unwrap();
            assert_eq!(a, c);
            assert!(with.queries() < without.queries());
            assert_eq!(without.queries(), 30 * 9);
        }
    }

    #[test]
    fn estimates_are_deterministic_and_nonnegative() {
        let spec = builtin("ex2").unwrap();
        let cands: Vec<usize> = (0..9).collect();
        let b = SampleBudget::new(400, 5.0 / 9.0, 42).unwrap();
        let o = SyntheticOracle::new(spec);
        let a = sample_influences(&o, &cands, &b).unwrap();
        let c = sample_influences(&o, &cands, &b).unwrap();
        assert_eq!(a, c);
        for i in 0..9 {
            let v = a.get(i).unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
        let other = sample_influences_with(
            &o,
            &cands,
            &b,
            SampleOptions {
                iteration: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn base_vertices_follow_q() {
        let mut ones = 0;
        for j in 0..2000 {
            ones += base_vertex(10, 0.3, 5, 0, j).unwrap().level();
        }
        let mean = ones as f64 / 2000.0;
        assert!((mean - 3.0).abs() < 0.15, "{mean}");
    }

    // Independent double loop over vertices and directions.
    fn brute_force(spec: &IdealSpec) -> Vec<u64> {
        let n = spec.n();
        let mut out = vec![0u64; n];
        for bits in 0..(1u64 << n) {
            let x = PointSet::from_bits(bits, n).unwrap();
            for (i, slot) in out.iter_mut().enumerate() {
                if !x.contains(i) && spec.value(x) != spec.value(x.with(i).unwrap()) {
                    *slot += 1;
                }
            }
        }
        out
    }

    #[test]
    fn exact_matches_brute_force_on_random_specs() {
        use rand::seq::index::sample;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 40 {
            let n = rng.gen_range(4..=12);
            let p = rng.gen_range(1..=3.min(n - 2));
            let k = rng.gen_range(1..=3);
            let zeros: Vec<PointSet> = (0..k)
                .map(|_| {
                    let level = rng.gen_range(p + 1..=n);
                    let idx = sample(&mut rng, n, level).into_vec();
                    PointSet::from_indices(&idx, n).unwrap()
                })
                .collect();
            let Ok(spec) = IdealSpec::from_maximal_elements(n, p, zeros) else {
                continue;
            };
            let o = SyntheticOracle::new(spec.clone());
            let InfluenceVector::Exact { values } = exact_influences(&o, n).unwrap() else {
                unreachable!()
            };
            assert_eq!(values, brute_force(&spec));
            checked += 1;
        }
    }

    #[test]
    fn degree_one_coefficient_is_negated_influence() {
        let spec = builtin("ex3").unwrap();
        let o = SyntheticOracle::new(spec.clone());
        let table = truth_table(&o, 8).unwrap();
        let counts = boundary_counts(&table, 8);
        for (i, c) in counts.iter().enumerate() {
            assert_eq!(scaled_fourier_coefficient(&table, 1 << i), -(*c as i64));
        }
    }

    #[test]
    fn restriction_reindexes_remaining_points() {
        let spec = builtin("ex1").unwrap();
        let o = SyntheticOracle::new(spec.clone());
        let table = truth_table(&o, 7).unwrap();
        let g = restrict_excluding(&table, 7, 3);
        // remaining points 0,1,2,4,5,6; the upper zero becomes 101111
        let zero: PointSet = "101111".parse().unwrap();
        assert!(!g[zero.bits() as usize]);
        for i in zero.non_members() {
            assert!(g[zero.with(i).unwrap().bits() as usize]);
        }
    }
}

//! Linear residual model: minimax fitting, the geometric feasibility oracle,
//! and synthetic data.
//!
//! A point is a row `(a, b)`; a subset is feasible when some `θ` keeps every
//! `|a·θ - b|` within `epsilon`. Both robust linear regression and the
//! linearized fundamental-matrix model (`a` holding the 8 monomials of a
//! correspondence, `b` the constant term) take this form.

mod chebyshev;
mod dataset;
pub mod simplex;

pub use chebyshev::{chebyshev_fit, ChebyshevFit};
pub use dataset::{
    gen_synthetic, residual, synthetic_model, DataPoint, Dataset, Label, INLIER_NOISE,
    OUTLIER_NOISE,
};

use crate::cube::PointSet;
use crate::error::Result;
use crate::oracle::{check_universe, FeasibilityResult, Oracle, QueryCounter};

/// Slack added to `epsilon` before a fit counts as infeasible.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Feasibility of `subset`: infeasible iff its minimax residual exceeds
/// `epsilon + 1e-12`. The basis is the fit's basis (empty for the empty set).
pub fn eval_geometric(data: &Dataset, subset: PointSet) -> Result<FeasibilityResult> {
    check_universe(&subset, data.len())?;
    if subset.is_empty() {
        return Ok(FeasibilityResult {
            infeasible: false,
            basis: Some(Vec::new()),
        });
    }
    let fit = chebyshev_fit(data, subset)?;
    Ok(FeasibilityResult {
        infeasible: fit.minimax_residual > data.epsilon() + FEASIBILITY_SLACK,
        basis: Some(fit.basis),
    })
}

/// Counting oracle over a [`Dataset`]; combinatorial dimension is `dim`.
#[derive(Debug)]
pub struct GeometricOracle {
    data: Dataset,
    counter: QueryCounter,
}

impl GeometricOracle {
    pub fn new(data: Dataset) -> Self {
        Self {
            data,
            counter: QueryCounter::new(),
        }
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn into_data(self) -> Dataset {
        self.data
    }
}

impl Oracle for GeometricOracle {
    fn universe(&self) -> usize {
        self.data.len()
    }

    fn combinatorial_dimension(&self) -> usize {
        self.data.dim()
    }

    fn evaluate(&self, x: PointSet) -> Result<FeasibilityResult> {
        self.counter.record();
        eval_geometric(&self.data, x)
    }

    fn supplies_basis(&self) -> bool {
        true
    }

    fn queries(&self) -> u64 {
        self.counter.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{check_monotone, MonotoneCheck};

    #[test]
    fn constant_model_is_infeasible_with_extreme_basis() {
        let points = [0.0, 1.0, 10.0]
            .iter()
            .map(|&b| DataPoint {
                a: vec![1.0],
                b,
                label: None,
            })
            .collect();
        let d = Dataset::new(1, 0.1, points).unwrap();
        let r = eval_geometric(&d, PointSet::full(3).unwrap()).unwrap();
        assert!(r.infeasible);
        assert_eq!(r.basis, Some(vec![0, 2]));
        let single = eval_geometric(&d, PointSet::from_indices(&[2], 3).unwrap()).unwrap();
        assert!(!single.infeasible);
    }

    #[test]
    fn small_subsets_are_feasible() {
        let d = gen_synthetic(15, 6, 4, 3).unwrap();
        let o = GeometricOracle::new(d);
        let x = PointSet::from_indices(&[0, 3, 9, 14], 15).unwrap();
        assert!(!o.is_infeasible(x).unwrap());
        assert!(!o.is_infeasible(PointSet::empty(15).unwrap()).unwrap());
        assert_eq!(o.queries(), 2);
    }

    #[test]
    fn inliers_only_is_feasible() {
        for seed in 0..10 {
            let d = gen_synthetic(25, 6, 5, seed).unwrap();
            let inl = PointSet::from_indices(&d.inliers(), 25).unwrap();
            assert!(!eval_geometric(&d, inl).unwrap().infeasible);
        }
        let clean = gen_synthetic(20, 0, 3, 1).unwrap();
        assert!(
            !eval_geometric(&clean, PointSet::full(20).unwrap())
                .unwrap()
                .infeasible
        );
    }

    #[test]
    fn adding_outlier_to_inliers_is_usually_infeasible() {
        let mut added = 0;
        let mut infeasible = 0;
        for seed in 0..20 {
            let d = gen_synthetic(20, 5, 3, seed).unwrap();
            let inl = PointSet::from_indices(&d.inliers(), 20).unwrap();
            for o in d.outliers() {
                added += 1;
                if eval_geometric(&d, inl.with(o).unwrap()).unwrap().infeasible {
                    infeasible += 1;
                }
            }
        }
        // outliers closer than a few ε to the model can still be absorbed
        let rate = infeasible as f64 / added as f64;
        assert!(rate > 0.9, "rate {rate}");
    }

    #[test]
    fn geometric_oracle_is_monotone_exhaustively() {
        for seed in 0..3 {
            let d = gen_synthetic(11, 3, 2, seed).unwrap();
            let o = GeometricOracle::new(d);
            assert!(check_monotone(&o, 11, MonotoneCheck::Exhaustive).unwrap());
        }
    }

    #[test]
    fn scaling_preserves_verdicts() {
        let d = gen_synthetic(12, 4, 2, 9).unwrap();
        for c in [0.01, 3.0, 250.0] {
            let s = d.scaled(c).unwrap();
            for bits in (0u64..1 << 12).step_by(37) {
                let x = PointSet::from_bits(bits, 12).unwrap();
                assert_eq!(
                    eval_geometric(&d, x).unwrap().infeasible,
                    eval_geometric(&s, x).unwrap().infeasible,
                    "c={c} x={x}"
                );
            }
        }
    }
}

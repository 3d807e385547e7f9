//! Minimax (L∞) fitting of the linear residual model.
//!
//! `min_θ max_{i∈S} |a_i·θ - b_i|` is solved through its dual
//!
//! ```text
//! maximize   Σ b_i (u_i - v_i)
//! subject to Σ (u_i - v_i) a_i = 0,   Σ (u_i + v_i) = 1,   u, v >= 0
//! ```
//!
//! which has `dim + 1` rows. The simplex multipliers of the optimal basis are
//! `(θ, t)`, and the points carrying positive dual weight form a basis of at
//! most `dim + 1` points whose own minimax residual equals that of `S`.

use serde::{Deserialize, Serialize};

use super::dataset::{residual, Dataset};
use super::simplex;
use crate::cube::PointSet;
use crate::error::{Error, Result};

const SUPPORT_TOL: f64 = 1e-12;

/// Result of a minimax fit on a subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevFit {
    pub theta: Vec<f64>,
    /// Largest absolute residual of the subset under `theta`.
    pub minimax_residual: f64,
    /// Points with positive dual weight, ascending; at most `dim + 1`.
    pub basis: Vec<usize>,
    /// The subset's coefficient vectors do not span the model space.
    pub degenerate: bool,
}

/// Fits `θ` minimizing the maximum residual over `subset`.
pub fn chebyshev_fit(data: &Dataset, subset: PointSet) -> Result<ChebyshevFit> {
    if subset.universe() != data.len() {
        return Err(Error::UniverseMismatch {
            left: subset.universe(),
            right: data.len(),
        });
    }
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let dim = data.dim();
    let members: Vec<usize> = subset.members().collect();
    let cols = 2 * members.len();
    let rows = dim + 1;
    let mut a = vec![0.0; rows * cols];
    let mut c = vec![0.0; cols];
    for (s, &i) in members.iter().enumerate() {
        let pt = &data.points()[i];
        for (r, &aij) in pt.a.iter().enumerate() {
            a[r * cols + 2 * s] = aij;
            a[r * cols + 2 * s + 1] = -aij;
        }
        a[dim * cols + 2 * s] = 1.0;
        a[dim * cols + 2 * s + 1] = 1.0;
        c[2 * s] = pt.b;
        c[2 * s + 1] = -pt.b;
    }
    let mut rhs = vec![0.0; rows];
    rhs[dim] = 1.0;
    let sol = simplex::solve(&a, &rhs, &c)?;

    let theta = sol.duals[..dim].to_vec();
    let mut basis: Vec<usize> = sol
        .basis
        .iter()
        .filter(|&&col| sol.x[col] > SUPPORT_TOL)
        .map(|&col| members[col / 2])
        .collect();
    basis.dedup();
    let minimax_residual = members
        .iter()
        .map(|&i| residual(&theta, &data.points()[i]))
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))?;
    Ok(ChebyshevFit {
        theta,
        minimax_residual,
        basis,
        degenerate: sol.redundant_rows,
    })
}

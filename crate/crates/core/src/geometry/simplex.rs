//! Dense two-phase tableau simplex for small standard-form programs
//!
//! `maximize c·x  subject to  A x = b, x >= 0` with `b >= 0`.
//!
//! Pivoting uses Bland's rule (lowest eligible column, ties in the ratio test
//! broken by lowest basic column), which rules out cycling and makes the
//! optimal vertex a deterministic function of the column order.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct LpSolution {
    /// Primal values, one per original column.
    pub x: Vec<f64>,
    /// Simplex multipliers `y = c_B B^-1`, one per row.
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Basic original columns.
    pub basis: Vec<usize>,
    /// Some row was redundant (its artificial could not leave the basis).
    pub redundant_rows: bool,
}

struct Tableau {
    rows: usize,
    cols: usize, // original + artificial, excluding rhs
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [f64]) {
        let w = self.cols + 1;
        let inv = 1.0 / self.data[pr * w + pc];
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f != 0.0 {
                for (v, p) in self.data[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                self.data[r * w + pc] = 0.0;
            }
        }
        let f = obj[pc];
        if f != 0.0 {
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on reduced costs `obj` (maximization; the last
    /// entry holds minus the objective value). Only columns `< eligible` may enter.
    fn optimize(&mut self, obj: &mut [f64], eligible: usize) -> Result<()> {
        let max_iter = 50 * (self.rows + self.cols) + 1000;
        for _ in 0..max_iter {
            let Some(pc) = (0..eligible).find(|&j| obj[j] > PIVOT_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(r) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bv)) => {
                            if ratio < bv - 1e-14
                                || (ratio <= bv + 1e-14 && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bv))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = best else {
                return Err(Error::Solver("unbounded linear program".into()));
            };
            self.pivot(pr, pc, obj);
        }
        Err(Error::Solver("iteration limit reached".into()))
    }
}

/// Solves `max c·x, A x = b, x >= 0` where `a` is row-major `rows × c.len()`.
pub fn solve(a: &[f64], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let rows = b.len();
    let n = c.len();
    debug_assert_eq!(a.len(), rows * n);
    let cols = n + rows;
    let w = cols + 1;
    let mut data = vec![0.0; rows * w];
    for r in 0..rows {
        let sign = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            data[r * w + j] = sign * a[r * n + j];
        }
        data[r * w + n + r] = 1.0;
        data[r * w + cols] = sign * b[r];
    }
    let mut t = Tableau {
        rows,
        cols,
        data,
        basis: (n..cols).collect(),
    };

    // Phase 1: maximize -(sum of artificials).
    let mut obj = vec![0.0; w];
    for r in 0..rows {
        for (j, o) in obj.iter_mut().enumerate().take(n) {
            *o += t.at(r, j);
        }
        obj[cols] += t.rhs(r);
    }
    t.optimize(&mut obj, n)?;
    let infeasibility: f64 = (0..rows)
        .filter(|&r| t.basis[r] >= n)
        .map(|r| t.rhs(r))
        .sum();
    if infeasibility > FEAS_TOL {
        return Err(Error::Solver("infeasible linear program".into()));
    }

    // Drive artificials out of the basis where possible.
    let mut redundant_rows = false;
    for r in 0..rows {
        if t.basis[r] >= n {
            match (0..n).find(|&j| t.at(r, j).abs() > 1e-9) {
                Some(j) => t.pivot(r, j, &mut obj),
                None => redundant_rows = true,
            }
        }
    }

    // Phase 2.
    let cost = |j: usize| if j < n { c[j] } else { 0.0 };
    let mut obj = vec![0.0; w];
    for (j, o) in obj.iter_mut().enumerate().take(cols) {
        *o = cost(j)
            - (0..rows)
                .map(|r| cost(t.basis[r]) * t.at(r, j))
                .sum::<f64>();
    }
    obj[cols] = -(0..rows).map(|r| cost(t.basis[r]) * t.rhs(r)).sum::<f64>();
    t.optimize(&mut obj, n)?;

    let mut x = vec![0.0; n];
    let mut basis = Vec::new();
    for r in 0..rows {
        let j = t.basis[r];
        if j < n {
            x[j] = t.rhs(r);
            basis.push(j);
        }
    }
    basis.sort_unstable();
    // B^-1 sits in the artificial columns; undo the row sign flips.
    let duals = (0..rows)
        .map(|k| {
            let sign = if b[k] < 0.0 { -1.0 } else { 1.0 };
            sign * (0..rows)
                .map(|r| cost(t.basis[r]) * t.at(r, n + k))
                .sum::<f64>()
        })
        .collect();
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution {
        x,
        duals,
        objective,
        basis,
        redundant_rows,
    })
}

// Robust linear regression: generate contaminated data, solve with every
// method, and compare against the exact optimum.
//
// ```text
// cargo run --release --example solve_regression
// ```

use std::error::Error;

use bmf_maxcon::geometry::{chebyshev_fit, gen_synthetic, synthetic_model, GeometricOracle};
use bmf_maxcon::influence::{SampleBudget, DEFAULT_M};
use bmf_maxcon::oracle::Oracle;
use bmf_maxcon::solvers::{bmf_maxcon, exact_maxcon, greedy_maxcon, ExactLimits, Method};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (n, n_out, dim, seed) = (30, 6, 4, 42);
    let data = gen_synthetic(n, n_out, dim, seed)?;
    println!(
        "N={n} outliers={:?} dim={dim} epsilon={}",
        data.outliers(),
        data.epsilon()
    );

    let exact = exact_maxcon(&GeometricOracle::new(data.clone()), ExactLimits::default())?;
    println!("\nmethod  consensus  gap  iterations  queries  removed");
    let budget = SampleBudget::with_default_q(DEFAULT_M, dim, n, seed)?;
    for method in [Method::Max, Method::Linf, Method::Greedy, Method::Exact] {
        let oracle = GeometricOracle::new(data.clone());
        let report = match method {
            Method::Exact => exact.clone(),
            Method::Greedy => greedy_maxcon(&oracle, &(0..n).collect::<Vec<_>>())?,
            _ => bmf_maxcon(&oracle, method, &budget)?,
        };
        // a fresh oracle confirms the answer
        assert!(!GeometricOracle::new(data.clone()).is_infeasible(report.solution)?);
        println!(
            "{:<6}  {:>9}  {:>3}  {:>10}  {:>7}  {:?}",
            method.as_str(),
            report.consensus_size,
            exact.consensus_size - report.consensus_size,
            report.iterations,
            report.oracle_queries,
            report.removed_sequence
        );
    }

    let fit = chebyshev_fit(&data, exact.solution)?;
    let truth = synthetic_model(dim, seed);
    println!(
        "\nminimax fit on the optimum: residual {:.4}",
        fit.minimax_residual
    );
    println!(
        "theta      {:?}",
        fit.theta
            .iter()
            .map(|t| format!("{t:.3}"))
            .collect::<Vec<_>>()
    );
    println!(
        "true model {:?}",
        truth.iter().map(|t| format!("{t:.3}")).collect::<Vec<_>>()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

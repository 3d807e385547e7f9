// Linearized fundamental-matrix estimation from a data file. Each row holds
// the eight monomials of a correspondence `(x, y) <-> (u, v)`
//
// ```text
// a = [ux, uy, u, vx, vy, v, x, y],  b = -1
// ```
//
// so `|a·θ - b|` is the algebraic epipolar error with `F33 = 1`.
//
// ```text
// cargo run --release --example fundamental_matrix [dataset.json]
// ```

use std::error::Error;
use std::path::PathBuf;

use bmf_maxcon::geometry::{Dataset, GeometricOracle};
use bmf_maxcon::influence::{SampleBudget, DEFAULT_M};
use bmf_maxcon::solvers::{bmf_maxcon, exact_maxcon, ExactLimits, Method};

fn default_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/fundamental_linearized.json")
}

pub fn run_on(path: PathBuf) -> Result<(), Box<dyn Error>> {
    let data = Dataset::load(&path)?;
    let n = data.len();
    println!(
        "{}: {n} correspondences, dim {}, epsilon {}, labelled outliers {:?}",
        path.display(),
        data.dim(),
        data.epsilon(),
        data.outliers()
    );
    let budget = SampleBudget::with_default_q(DEFAULT_M, data.dim(), n, 0)?;
    let exact = exact_maxcon(&GeometricOracle::new(data.clone()), ExactLimits::default())?;
    for method in [Method::Max, Method::Linf] {
        let r = bmf_maxcon(&GeometricOracle::new(data.clone()), method, &budget)?;
        let mut removed: Vec<usize> = r.solution.non_members().collect();
        removed.sort_unstable();
        println!(
            "{method:<4}: consensus {} (exact {}), excluded {removed:?}, {} queries",
            r.consensus_size, exact.consensus_size, r.oracle_queries
        );
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run_on(default_path())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    match std::env::args_os().nth(1) {
        Some(p) => run_on(p.into()),
        None => run_example(),
    }
}

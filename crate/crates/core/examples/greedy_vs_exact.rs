// Feasible sets do not form a matroid: on ex2 some insertion orders trap
// greedy at the smaller structure while the optimum has five points.
//
// ```text
// cargo run --example greedy_vs_exact
// ```

use std::error::Error;

use bmf_maxcon::oracle::{builtin, BasisEmulator, SyntheticOracle};
use bmf_maxcon::solvers::{exact_maxcon, greedy_maxcon, ExactLimits};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = builtin("ex2").unwrap();
    let n = spec.n();
    let oracle = BasisEmulator::new(SyntheticOracle::new(spec.clone()));
    let exact = exact_maxcon(&oracle, ExactLimits::default())?;
    println!(
        "ex2 upper zeros {:?}",
        spec.upper_zeros()
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
    );
    println!("exact: {} (size {})", exact.solution, exact.consensus_size);

    let natural: Vec<usize> = (0..n).collect();
    let g = greedy_maxcon(&oracle, &natural)?;
    println!(
        "greedy, order {natural:?}: {} (size {})",
        g.solution, g.consensus_size
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut sizes = [0usize; 10];
    for _ in 0..200 {
        let mut order = natural.clone();
        order.shuffle(&mut rng);
        sizes[greedy_maxcon(&oracle, &order)?.consensus_size] += 1;
    }
    println!("greedy over 200 random orders:");
    for (size, count) in sizes.iter().enumerate().filter(|(_, c)| **c > 0) {
        println!("  size {size}: {count}");
    }
    if g.consensus_size >= exact.consensus_size {
        return Err("expected greedy to fall short".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

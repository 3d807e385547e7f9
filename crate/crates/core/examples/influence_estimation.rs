// Sampled influence estimates converge to the exact boundary counts, and the
// q-weighted estimator separates outliers from inliers.
//
// ```text
// cargo run --example influence_estimation
// ```

use std::error::Error;

use bmf_maxcon::influence::{default_q, exact_influences, sample_influences, SampleBudget};
use bmf_maxcon::oracle::{builtin, SyntheticOracle};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = builtin("ex1").unwrap();
    let n = spec.n();
    let oracle = SyntheticOracle::new(spec.clone());
    let exact = exact_influences(&oracle, n)?;
    println!("ex1 exact edge counts: {}", exact.to_json());

    let all: Vec<usize> = (0..n).collect();
    let scale = (1u64 << n) as f64;
    println!("\n q = 0.5, averaged over 100 seeds of m = 500");
    println!("point  exact/2^N  mean estimate");
    let mut sums = vec![0.0; n];
    for seed in 0..100 {
        let est = sample_influences(&oracle, &all, &SampleBudget::new(500, 0.5, seed)?)?;
        for (i, s) in sums.iter_mut().enumerate() {
            *s += est.get(i).unwrap();
        }
    }
    for (i, s) in sums.iter().enumerate() {
        println!(
            "{i:>5}  {:>9.4}  {:>13.4}",
            exact.get(i).unwrap() / scale,
            s / 100.0
        );
    }

    let q = default_q(spec.p(), n);
    let mut hits = 0;
    for seed in 0..100 {
        let est = sample_influences(&oracle, &all, &SampleBudget::new(2000, q, seed)?)?;
        if [1, 3].contains(&est.argmax().unwrap()) {
            hits += 1;
        }
    }
    println!("\nq = (p+3)/N = {q:.3}, m = 2000: argmax is an outlier in {hits}/100 runs");
    println!(
        "{} oracle queries in total",
        bmf_maxcon::oracle::Oracle::queries(&oracle)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

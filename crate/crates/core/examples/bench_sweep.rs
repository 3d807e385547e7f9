// Small outlier sweep through the benchmark harness: CSV rows, percentile
// summary, and the iteration-count slope.
//
// ```text
// cargo run --release --example bench_sweep
// ```

use std::error::Error;

use bmf_maxcon::bench::{
    format_summary, iteration_slope, run_bench, summarize, write_csv, BenchConfig,
};
use bmf_maxcon::solvers::Method;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = BenchConfig {
        dim: 3,
        n: 20,
        outlier_sweep: vec![2, 4, 6],
        repeats: 5,
        m: 300,
        methods: vec![Method::Max, Method::Linf, Method::Greedy, Method::Exact],
        ..Default::default()
    };
    let rows = run_bench(&cfg)?;
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    let text = String::from_utf8(csv)?;
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("... {} rows\n", rows.len());
    print!("{}", format_summary(&summarize(&rows)));
    for m in [Method::Max, Method::Linf] {
        println!(
            "{m}: iterations per outlier {:.2}",
            iteration_slope(&rows, m).unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Closed-form cell influences against cube enumeration for the built-in
// specifications and a batch of random ones.
//
// ```text
// cargo run --example verify_theorems
// ```

use std::error::Error;

use bmf_maxcon::cli::format_verify_table;
use bmf_maxcon::cube::PointSet;
use bmf_maxcon::formulas::{verify_spec, VerifyMode};
use bmf_maxcon::oracle::{builtin, IdealSpec, BUILTIN_IDS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_ideal(rng: &mut ChaCha8Rng) -> Option<IdealSpec> {
    let n = rng.gen_range(6..=12);
    let p = rng.gen_range(1..=2);
    let k = rng.gen_range(1..=3);
    let zeros = (0..k)
        .map(|_| {
            let mut bits = 0u64;
            while (bits.count_ones() as usize) <= p {
                bits |= 1 << rng.gen_range(0..n);
            }
            PointSet::from_bits(
                bits | rng.gen::<u64>() & rng.gen::<u64>() & ((1 << n) - 1),
                n,
            )
        })
        .collect::<Result<Vec<_>, _>>()
        .ok()?;
    let spec = IdealSpec::from_maximal_elements(n, p, zeros).ok()?;
    spec.is_ideal().then_some(spec)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for id in BUILTIN_IDS {
        let report = verify_spec(&builtin(id).unwrap(), VerifyMode::Auto)?;
        println!("{id}");
        print!("{}", format_verify_table(&report));
        println!();
        if !report.all_match {
            return Err(format!("{id} mismatch").into());
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    while checked < 50 {
        let Some(spec) = random_ideal(&mut rng) else {
            continue;
        };
        let report = verify_spec(&spec, VerifyMode::Auto)?;
        if !(report.all_match && report.ordering_holds) {
            return Err(format!("random spec failed: {}", spec.to_json()).into());
        }
        checked += 1;
    }
    println!("{checked} random ideal specifications: formulas and ordering agree with enumeration");

    // treating the overlapping ex4 zeros as ideal breaks the closed form
    let forced = verify_spec(&builtin("ex4").unwrap(), VerifyMode::AssumeIdeal)?;
    println!(
        "ex4 without pseudo upper zeros: {} of 8 points match",
        forced.points.iter().filter(|p| p.matched).count()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Local expansion grows any feasible set to a 1-maximal one. Inside a single
// structure, subsets with at least `p` points reach the upper zero; smaller
// ones can pick up an outlier first, since every set of `p` points is feasible.
//
// ```text
// cargo run --example local_expansion
// ```

use std::error::Error;

use bmf_maxcon::cube::PointSet;
use bmf_maxcon::oracle::{builtin, Oracle, SyntheticOracle};
use bmf_maxcon::solvers::local_expansion;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = builtin("ex1").unwrap();
    let zero = spec.upper_zeros()[0];
    let oracle = SyntheticOracle::new(spec.clone());
    let members: Vec<usize> = zero.members().collect();
    let mut reached = 0;
    for mask in 0u32..(1 << members.len()) {
        let picked: Vec<usize> = members
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let start = PointSet::from_indices(&picked, spec.n())?;
        let end = local_expansion(&oracle, start)?;
        if end == zero {
            reached += 1;
        }
        if picked.len() <= 1 || mask == 0b11010 {
            println!("{start} -> {end}");
        }
    }
    println!(
        "{reached}/{} subsets of {zero} expand to level {}",
        1 << members.len(),
        zero.level()
    );

    let trap = PointSet::from_indices(&[0, 1], spec.n())?;
    println!("{trap} -> {}", local_expansion(&oracle, trap)?);
    println!("{} oracle queries", oracle.queries());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

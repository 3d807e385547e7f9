use bmf_maxcon::cube::PointSet;
use bmf_maxcon::geometry::{gen_synthetic, GeometricOracle};
use bmf_maxcon::influence::{
    exact_influences, sample_influences, InfluenceVector, SampleBudget, DEFAULT_M,
};
use bmf_maxcon::oracle::{IdealSpec, Oracle, SyntheticOracle};
use bmf_maxcon::solvers::{
    bmf_maxcon, exact_maxcon, greedy_maxcon, local_expansion, ExactLimits, Method,
};
use proptest::prelude::*;

#[test]
fn near_optimal_on_five_outliers() {
    for method in [Method::Max, Method::Linf] {
        let mut close = 0;
        for seed in 0..50 {
            let data = gen_synthetic(30, 5, 4, seed).unwrap();
            let exact =
                exact_maxcon(&GeometricOracle::new(data.clone()), ExactLimits::default()).unwrap();
            let b = SampleBudget::with_default_q(DEFAULT_M, 4, 30, seed).unwrap();
            let r = bmf_maxcon(&GeometricOracle::new(data), method, &b).unwrap();
            if exact.consensus_size - r.consensus_size <= 2 {
                close += 1;
            }
        }
        assert!(close >= 45, "{method}: {close}/50");
    }
}

fn spec_strategy() -> impl Strategy<Value = IdealSpec> {
    (4usize..=10, 1usize..=2)
        .prop_flat_map(|(n, p)| {
            let zero = prop::collection::vec(any::<bool>(), n);
            (Just(n), Just(p), prop::collection::vec(zero, 1..=3))
        })
        .prop_filter_map("needs zeros above level p", |(n, p, zeros)| {
            let sets: Vec<PointSet> = zeros
                .iter()
                .map(|z| {
                    let idx: Vec<usize> = (0..n).filter(|&i| z[i]).collect();
                    PointSet::from_indices(&idx, n).unwrap()
                })
                .filter(|s| s.level() > p)
                .collect();
            if sets.is_empty() {
                return None;
            }
            IdealSpec::from_maximal_elements(n, p, sets).ok()
        })
}

fn one_maximal<O: Oracle>(o: &O, x: PointSet) -> bool {
    !o.is_infeasible(x).unwrap()
        && x.non_members()
            .all(|i| o.is_infeasible(x.with(i).unwrap()).unwrap())
}

// Boundary-edge counts by direct enumeration.
fn naive_counts(spec: &IdealSpec) -> Vec<u64> {
    let n = spec.n();
    (0..n)
        .map(|i| {
            (0..1u64 << n)
                .filter(|x| x >> i & 1 == 0)
                .filter(|&x| {
                    let lo = PointSet::from_bits(x, n).unwrap();
                    spec.value(lo) != spec.value(lo.with(i).unwrap())
                })
                .count() as u64
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_is_one_maximal_superset(spec in spec_strategy(), seed in any::<u64>()) {
        let o = SyntheticOracle::new(spec.clone());
        let zero = spec.upper_zeros()[seed as usize % spec.upper_zeros().len()];
        let start = PointSet::from_bits(zero.bits() & seed, spec.n()).unwrap();
        let end = local_expansion(&o, start).unwrap();
        prop_assert!(start.is_below(&end).unwrap());
        prop_assert!(one_maximal(&o, end));
    }

    #[test]
    fn solvers_return_one_maximal_sets(spec in spec_strategy(), seed in 0u64..1000) {
        let o = SyntheticOracle::new(spec.clone());
        let b = SampleBudget::with_default_q(200, spec.p(), spec.n(), seed).unwrap();
        let r = bmf_maxcon(&o, Method::Max, &b).unwrap();
        prop_assert!(one_maximal(&o, r.solution));
        prop_assert_eq!(r.iterations, r.removed_sequence.len());
        prop_assert!(r.iterations <= spec.n());
        let order: Vec<usize> = (0..spec.n()).rev().collect();
        let g = greedy_maxcon(&o, &order).unwrap();
        prop_assert!(one_maximal(&o, g.solution));
        let best = spec.upper_zeros().iter().map(|z| z.level()).max().unwrap();
        prop_assert!(r.consensus_size <= best && g.consensus_size <= best);
    }

    #[test]
    fn exact_influences_match_enumeration(spec in spec_strategy()) {
        let o = SyntheticOracle::new(spec.clone());
        let InfluenceVector::Exact { values } = exact_influences(&o, spec.n()).unwrap() else {
            unreachable!()
        };
        prop_assert_eq!(values, naive_counts(&spec));
    }

    #[test]
    fn sampling_is_seed_deterministic(spec in spec_strategy(), seed in any::<u64>(), half in 1usize..150) {
        let all: Vec<usize> = (0..spec.n()).collect();
        let b = SampleBudget::new(2 * half, 0.4, seed).unwrap();
        let a = sample_influences(&SyntheticOracle::new(spec.clone()), &all, &b).unwrap();
        let c = sample_influences(&SyntheticOracle::new(spec.clone()), &all, &b).unwrap();
        prop_assert_eq!(a.clone(), c);
        for i in 0..spec.n() {
            let v = a.get(i).unwrap();
            prop_assert!((0.0..=0.5).contains(&v));
        }
    }

    #[test]
    fn spec_json_round_trip(spec in spec_strategy()) {
        let back = IdealSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

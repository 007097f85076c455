use std::collections::BTreeMap;
use std::io::Write;

use fitex::pss::expansion_check_with;
use fitex::synth::{fits, solve_min_with, solve_pooled, upper_bound, FitProblem};
use fitex::{BitVector, Config, Sample, SampleSet};
use proptest::prelude::*;

fn cfg(threads: usize) -> Config {
    Config::default().with_threads(threads)
}

fn set(n: usize, raw: &BTreeMap<u32, bool>) -> SampleSet {
    SampleSet::from_samples(n, raw.iter().map(|(k, b)| Sample::labeled(BitVector::new(n, *k), *b))).unwrap()
}

fn b3_samples() -> impl Strategy<Value = BTreeMap<u32, bool>> {
    prop::collection::btree_map(0u32..8, any::<bool>(), 1..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witness_is_sound(raw in b3_samples()) {
        let sv = set(3, &raw);
        let r = solve_min_with(&FitProblem::new(sv.clone()), &cfg(2)).unwrap();
        prop_assert!(fits(&sv, &r.witness));
        prop_assert_eq!(r.witness.node_count(), r.d_min);
        prop_assert!(r.d_min <= upper_bound(&sv).node_count());
    }

    #[test]
    fn adding_a_sample_never_lowers_d(raw in b3_samples(), extra in 0u32..8, label in any::<bool>()) {
        let sv = set(3, &raw);
        let v = BitVector::new(3, extra);
        prop_assume!(!sv.contains(&v));
        let before = solve_min_with(&FitProblem::new(sv.clone()), &cfg(2)).unwrap().d_min;
        let grown = sv.with(Sample::labeled(v, label)).unwrap();
        let after = solve_min_with(&FitProblem::new(grown), &cfg(2)).unwrap().d_min;
        prop_assert!(after >= before);
    }

    #[test]
    fn contradicting_every_minimal_function_raises_d(raw in b3_samples(), extra in 0u32..8) {
        let sv = set(3, &raw);
        let v = BitVector::new(3, extra);
        prop_assume!(!sv.contains(&v));
        let r = expansion_check_with(&sv, &v, &cfg(2)).unwrap();
        if r.contradicts_all {
            prop_assert!(r.strict);
        }
    }

    #[test]
    fn result_is_independent_of_threads(raw in b3_samples()) {
        let sv = set(3, &raw);
        let p = FitProblem::new(sv).enumerate_all();
        let a = solve_min_with(&p, &cfg(1)).unwrap();
        let b = solve_min_with(&p, &cfg(4)).unwrap();
        prop_assert_eq!(a.d_min, b.d_min);
        prop_assert_eq!(a.witness, b.witness);
        prop_assert_eq!(a.function_classes, b.function_classes);
    }

    #[test]
    fn pooled_fit_is_never_below_minimum(raw in b3_samples()) {
        let sv = set(3, &raw);
        let c = cfg(2);
        let d_min = solve_min_with(&FitProblem::new(sv.clone()), &c).unwrap().d_min;
        let pool = vec![upper_bound(&sv)];
        let fit = solve_pooled(&sv, &pool, 8, &c).unwrap().expect("the pool member fits");
        prop_assert!(fits(&sv, &fit.circuit));
        prop_assert!(fit.d >= d_min);
        prop_assert!(fit.d <= pool[0].node_count());
    }
}

/// The single-witness reading: label the new point against the canonical
/// witness only. Failures are counted and printed, not asserted; only the
/// all-classes reading is a theorem.
#[test]
fn single_witness_expansion_on_b2() {
    let (mut cases, mut flat) = (0, 0);
    for labels in 1..81u32 {
        let mut samples = Vec::new();
        let mut code = labels;
        for k in 0..4u32 {
            match code % 3 {
                1 => samples.push(Sample::labeled(BitVector::new(2, k), false)),
                2 => samples.push(Sample::labeled(BitVector::new(2, k), true)),
                _ => {}
            }
            code /= 3;
        }
        let sv = SampleSet::from_samples(2, samples).unwrap();
        for k in 0..4u32 {
            let b = BitVector::new(2, k);
            if sv.contains(&b) {
                continue;
            }
            let r = expansion_check_with(&sv, &b, &cfg(1)).unwrap();
            cases += 1;
            assert!(!r.contradicts_all || r.strict);
            flat += usize::from(!r.strict);
        }
    }
    let _ = writeln!(
        std::io::stderr(),
        "\nsingle-witness expansion on B^2: {} of {cases} cases keep d_min",
        flat
    );
}

use std::collections::BTreeSet;

use fitex::pss::{is_pss_with, pss_to_circuit_bound_with};
use fitex::{BitVector, Config, TruthTable};
use proptest::prelude::*;

fn cfg() -> Config {
    Config::default().with_threads(2)
}

fn whole(n: usize) -> BTreeSet<BitVector> {
    BitVector::all(n).collect()
}

fn subset(n: usize, mask: u32) -> BTreeSet<BitVector> {
    BitVector::all(n).enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v).collect()
}

#[test]
fn whole_domain_is_proper_for_every_small_function() {
    for n in 1..=3 {
        for bits in 0..(1u64 << (1 << n)) {
            let f = TruthTable::from_u64(n, bits);
            let r = is_pss_with(&f, &whole(n), &cfg()).unwrap();
            assert!(r.is_pss, "{f}");
        }
    }
}

#[test]
fn supersets_of_proper_sets_are_proper_on_b2() {
    for bits in 0..16u64 {
        let f = TruthTable::from_u64(2, bits);
        for mask in 1u32..16 {
            let s = subset(2, mask);
            if !is_pss_with(&f, &s, &cfg()).unwrap().is_pss {
                continue;
            }
            for extra in 0u32..16 {
                let t = subset(2, mask | extra);
                assert!(is_pss_with(&f, &t, &cfg()).unwrap().is_pss, "{f} {mask:04b} {extra:04b}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn supersets_stay_proper(bits in 0u64..256, mask in 1u32..256, extra in 0u32..256) {
        let f = TruthTable::from_u64(3, bits);
        let s = subset(3, mask);
        prop_assume!(is_pss_with(&f, &s, &cfg()).unwrap().is_pss);
        prop_assert!(is_pss_with(&f, &subset(3, mask | extra), &cfg()).unwrap().is_pss);
    }

    #[test]
    fn proper_sets_bound_the_circuit(bits in 0u64..256, mask in 1u32..256) {
        let f = TruthTable::from_u64(3, bits);
        let s = subset(3, mask);
        let report = is_pss_with(&f, &s, &cfg()).unwrap();
        prop_assume!(report.is_pss);
        let b = pss_to_circuit_bound_with(&f, &s, &cfg()).unwrap();
        prop_assert_eq!(b.circuit.truth_table().unwrap(), f);
        prop_assert_eq!(b.d, report.d_min);
        if b.d > 0 {
            prop_assert!(b.d < b.bound);
        }
    }
}

use super::*;
use crate::circuit::fixtures::*;
use crate::circuit::Polarity;
use crate::function::Sample;

fn bv(s: &str) -> BitVector {
    s.parse().unwrap()
}

fn table(s: &str) -> TruthTable {
    s.parse().unwrap()
}

fn labeled(n: usize, items: &[(&str, bool)]) -> SampleSet {
    SampleSet::from_samples(n, items.iter().map(|(v, b)| Sample::labeled(bv(v), *b))).unwrap()
}

fn on(f: &str, pts: &[&str]) -> SampleSet {
    let pts: Vec<BitVector> = pts.iter().map(|p| bv(p)).collect();
    SampleSet::from_function(&table(f), &pts).unwrap()
}

fn serial() -> Config {
    Config::default().with_threads(1)
}

#[test]
fn or_samples_choose_single_or_node() {
    let sv = labeled(2, &[("00", false), ("10", true), ("01", true)]);
    let r = solve_min_with(&FitProblem::new(sv.clone()), &serial()).unwrap();
    assert_eq!(r.d_min, 1);
    assert_eq!(r.witness.to_string(), "b1 | b2");
    assert!(sv.fits(&r.witness).unwrap());
}

#[test]
fn or_on_two_points_gives_literal() {
    let r = solve_min_with(&FitProblem::new(on("0111", &["10", "00"])), &serial()).unwrap();
    assert_eq!(r.d_min, 0);
    assert_eq!(r.witness.truth_table().unwrap(), TruthTable::variable(2, 0));
}

#[test]
fn and_on_two_points_is_fit_by_b1() {
    // Labels: (0,1) -> 0, (1,1) -> 1. b1 fits; b2 would give 1 at (0,1).
    let sv = on("0001", &["01", "11"]);
    let r = solve_min_with(&FitProblem::new(sv.clone()), &serial()).unwrap();
    assert_eq!(r.d_min, 0);
    assert_eq!(r.witness, Circuit::literal(2, 0, Polarity::Direct));
    assert!(!sv.fits(&Circuit::literal(2, 1, Polarity::Direct)).unwrap());
}

#[test]
fn full_xor_needs_three_nodes() {
    let sv = SampleSet::full(&table("0110"));
    let r = solve_min_with(&FitProblem::new(sv).enumerate_all(), &serial()).unwrap();
    assert_eq!(r.d_min, 3);
    assert_eq!(r.witness, c_xor());
    assert_eq!(r.function_classes.len(), 1);
}

#[test]
fn example_four_two_classes() {
    let two = labeled(2, &[("11", true), ("00", false)]);
    let classes = enumerate_min_functions_with(&FitProblem::new(two), &serial()).unwrap();
    assert!(classes.contains(&TruthTable::variable(2, 0)));
    assert!(classes.contains(&TruthTable::variable(2, 1)));
    let three = labeled(2, &[("11", true), ("00", false), ("10", true)]);
    let classes = enumerate_min_functions_with(&FitProblem::new(three), &serial()).unwrap();
    assert_eq!(classes.into_iter().collect::<Vec<_>>(), vec![TruthTable::variable(2, 0)]);
}

#[test]
fn full_table_forces_function() {
    for bits in 0..16u64 {
        let f = TruthTable::from_u64(2, bits);
        let classes = enumerate_min_functions_with(&FitProblem::new(SampleSet::full(&f)), &serial()).unwrap();
        assert_eq!(classes.into_iter().collect::<Vec<_>>(), vec![f]);
    }
}

#[test]
fn c_f_is_recovered_from_its_table() {
    let f = c_f().truth_table().unwrap();
    let r = solve_min_with(&FitProblem::new(SampleSet::full(&f)), &serial()).unwrap();
    assert_eq!(r.d_min, 2);
    assert_eq!(r.witness.truth_table().unwrap(), f);
}

#[test]
fn upper_bound_examples() {
    let or_pss = labeled(2, &[("10", true), ("01", true), ("00", false)]);
    assert_eq!(upper_bound(&or_pss).node_count(), 3);
    let neg = labeled(2, &[("00", false), ("11", false)]);
    assert_eq!(upper_bound(&neg), Circuit::constant(2, false));
    assert_eq!(upper_bound(&SampleSet::full(&table("0110"))).node_count(), 3);
}

#[test]
fn cap_exceeded_is_reported() {
    let sv = SampleSet::full(&table("0110"));
    let err = solve_min_with(&FitProblem::new(sv).with_cap(2), &serial()).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { cap: 2 }));
    assert!(err.is_budget());
}

#[test]
fn unlabeled_and_empty_rejected() {
    let mut sv = SampleSet::new(2);
    assert!(matches!(solve_min_with(&FitProblem::new(sv.clone()), &serial()), Err(Error::EmptySamples)));
    sv.insert(Sample::new(bv("10"), None)).unwrap();
    assert!(matches!(
        solve_min_with(&FitProblem::new(sv), &serial()),
        Err(Error::UnlabeledSample { .. })
    ));
}

#[test]
fn threads_do_not_change_result() {
    let f = crate::function::parity_fn(3);
    let p = FitProblem::new(SampleSet::full(&f)).enumerate_all();
    let a = solve_min_with(&p, &serial()).unwrap();
    let b = solve_min_with(&p, &Config::default().with_threads(4)).unwrap();
    assert_eq!(a.d_min, b.d_min);
    assert_eq!(a.witness, b.witness);
    assert_eq!(a.function_classes, b.function_classes);
    assert_eq!(a.witnesses, b.witnesses);
    assert_eq!(a.stats.examined, b.stats.examined);
}

#[test]
fn pooled_search_uses_member() {
    let f = c_f().truth_table().unwrap();
    let sv = SampleSet::full(&f);
    let member = Circuit::from_nodes(3, vec![WorkingNode::and(lit(2), nlit(3))]).unwrap();
    let fit = solve_pooled(&sv, &[member], 6, &serial()).unwrap().unwrap();
    assert_eq!(fit.d, 2);
    assert_eq!(fit.new_nodes, 1);
    assert_eq!(fit.circuit.truth_table().unwrap(), f);
}

#[test]
fn pooled_search_without_members_matches_solver() {
    let sv = SampleSet::full(&table("0110"));
    let fit = solve_pooled(&sv, &[], 6, &serial()).unwrap().unwrap();
    assert_eq!(fit.d, 3);
    assert_eq!(fit.new_nodes, 3);
}

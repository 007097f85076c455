//! Boolean functions: generator families, sample sets and the explicit
//! minterm/DNF constructions.

mod samples;

pub use samples::{Sample, SampleSet};

use crate::bits::BitVector;
use crate::circuit::{Body, Circuit, Edge, NodeRef, Polarity, WorkingNode};
use crate::error::{Error, Result};
use crate::table::TruthTable;

/// sign(x) = 1 iff x > 0.
fn sign(x: f64) -> bool {
    x > 0.0
}

pub fn truth_table_of(c: &Circuit) -> Result<TruthTable> {
    c.truth_table()
}

/// 1 iff an odd number of inputs are 1.
pub fn parity_fn(n: usize) -> TruthTable {
    TruthTable::from_fn(n, |v| v.count_ones() % 2 == 1)
}

/// sign(r_1 b_1 + … + r_N b_N − θ).
pub fn threshold_fn(weights: &[f64], theta: f64, n: usize) -> Result<TruthTable> {
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: weights.len(),
        });
    }
    Ok(TruthTable::from_fn(n, |v| {
        let s: f64 = v.iter().zip(weights).map(|(b, w)| if b { *w } else { 0.0 }).sum();
        sign(s - theta)
    }))
}

/// Embeds v as x = Σ b_k 2^{−k} and returns sign(P(x)); `coeffs[i]` is the
/// coefficient of x^i.
pub fn polynomial_embed_fn(coeffs: &[f64], n: usize) -> TruthTable {
    TruthTable::from_fn(n, |v| {
        let x: f64 = v
            .iter()
            .enumerate()
            .map(|(k, b)| if b { 0.5f64.powi(k as i32 + 1) } else { 0.0 })
            .sum();
        let p = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        sign(p)
    })
}

fn literal_edge(v: &BitVector, j: usize) -> Edge {
    Edge::new(NodeRef::Input(j), Polarity::from_negated(!v.get(j)))
}

/// Appends the left-deep AND chain for the minterm of `v` to `nodes` and
/// returns the edge carrying its value.
pub(crate) fn push_minterm(v: &BitVector, nodes: &mut Vec<WorkingNode>) -> Edge {
    let mut acc = literal_edge(v, 0);
    for j in 1..v.len() {
        nodes.push(WorkingNode::and(acc, literal_edge(v, j)));
        acc = Edge::working(nodes.len() - 1);
    }
    acc
}

fn circuit_from_edge(n: usize, nodes: Vec<WorkingNode>, out: Edge) -> Circuit {
    if nodes.is_empty() {
        match out.source {
            NodeRef::Input(j) => Circuit::literal(n, j, out.polarity),
            NodeRef::Working(_) => unreachable!("no nodes to reference"),
        }
    } else {
        debug_assert_eq!(out, Edge::working(nodes.len() - 1));
        Circuit::new_unchecked(n, Body::Nodes(nodes))
    }
}

/// C_v: 1 exactly at `v`, with N−1 AND nodes.
pub fn minterm_circuit(v: &BitVector) -> Circuit {
    let mut nodes = Vec::new();
    let out = push_minterm(v, &mut nodes);
    circuit_from_edge(v.len(), nodes, out)
}

/// OR chain of the minterm circuits of the positive samples; fits every
/// labeled sample. No positives gives ConstFalse; a set whose samples are all
/// positive gives ConstTrue.
pub fn dnf_fitting_circuit(sv: &SampleSet) -> Circuit {
    let n = sv.n_inputs();
    let positives: Vec<BitVector> = sv.positives().collect();
    if positives.is_empty() {
        return Circuit::constant(n, false);
    }
    if sv.labeled().all(|(_, b)| b) && positives.len() > 1 {
        return Circuit::constant(n, true);
    }
    let mut nodes = Vec::new();
    let mut acc = push_minterm(&positives[0], &mut nodes);
    for v in &positives[1..] {
        let m = push_minterm(v, &mut nodes);
        nodes.push(WorkingNode::or(acc, m));
        acc = Edge::working(nodes.len() - 1);
    }
    circuit_from_edge(n, nodes, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::fixtures::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn table(s: &str) -> TruthTable {
        s.parse().unwrap()
    }

    #[test]
    fn or_circuit_table() {
        let c = Circuit::from_nodes(2, vec![WorkingNode::or(lit(1), lit(2))]).unwrap();
        assert_eq!(truth_table_of(&c).unwrap(), table("0111"));
        assert_eq!(truth_table_of(&Circuit::constant(3, false)).unwrap(), TruthTable::constant(3, false));
    }

    #[test]
    fn parity_tables() {
        assert_eq!(parity_fn(3), table("01101001"));
        assert_eq!(parity_fn(1), table("01"));
        assert!(!parity_fn(4).at(&bv("1111")));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(threshold_fn(&[1.0, 1.0], 0.5, 2).unwrap(), table("0111"));
        assert_eq!(threshold_fn(&[1.0, 1.0], 1.5, 2).unwrap(), table("0001"));
        assert_eq!(threshold_fn(&[0.0, 0.0], 1.0, 2).unwrap(), table("0000"));
        assert!(threshold_fn(&[1.0], 0.0, 2).is_err());
    }

    #[test]
    fn polynomial_examples() {
        // x = 0, 0.5, 0.25, 0.75 over rows 00, 10, 01, 11
        assert_eq!(polynomial_embed_fn(&[-0.4, 1.0], 2), table("0101"));
        assert_eq!(polynomial_embed_fn(&[1.0], 3), TruthTable::constant(3, true));
        assert_eq!(polynomial_embed_fn(&[0.0, 1.0], 1), table("01"));
    }

    #[test]
    fn minterm_shapes() {
        let c = minterm_circuit(&bv("100"));
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.to_string(), "(b1 & !b2) & !b3");
        let lit1 = minterm_circuit(&bv("1"));
        assert_eq!(lit1.node_count(), 0);
        assert_eq!(lit1.truth_table().unwrap(), table("01"));
    }

    #[test]
    fn dnf_on_or_samples() {
        let sv = SampleSet::from_function(&table("0111"), &[bv("10"), bv("01"), bv("00")]).unwrap();
        let c = dnf_fitting_circuit(&sv);
        assert_eq!(c.node_count(), 3);
        assert!(sv.fits(&c).unwrap());
        let neg = SampleSet::from_function(&table("0000"), &[bv("10")]).unwrap();
        assert_eq!(dnf_fitting_circuit(&neg), Circuit::constant(2, false));
    }

    #[test]
    fn dnf_all_positive_single_input() {
        let sv = SampleSet::full(&table("11"));
        let c = dnf_fitting_circuit(&sv);
        assert!(sv.fits(&c).unwrap());
        assert!(c.to_connection_matrix().is_err() || c.is_degenerate());
    }

    #[test]
    fn dnf_reproduces_every_small_function() {
        for n in 1..=3 {
            for bits in 0..(1u64 << (1 << n)) {
                let f = TruthTable::from_u64(n, bits);
                let c = dnf_fitting_circuit(&SampleSet::full(&f));
                assert_eq!(c.truth_table().unwrap(), f);
                assert!(c.is_valid());
                let k = f.count_ones();
                if k > 0 {
                    assert!(c.node_count() < n * k.max(1));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn minterm_has_single_one(n in 1usize..=6, raw in any::<u32>()) {
            let v = BitVector::new(n, raw);
            let t = minterm_circuit(&v).truth_table().unwrap();
            prop_assert_eq!(t.count_ones(), 1);
            prop_assert!(t.at(&v));
            prop_assert_eq!(minterm_circuit(&v).node_count(), n - 1);
        }

        #[test]
        fn dnf_fits_random_samples(raw in prop::collection::btree_map(0u32..8, any::<bool>(), 1..8)) {
            let sv = SampleSet::from_samples(
                3,
                raw.iter().map(|(k, b)| Sample::labeled(BitVector::new(3, *k), *b)),
            ).unwrap();
            let c = dnf_fitting_circuit(&sv);
            prop_assert!(sv.fits(&c).unwrap());
            let k = sv.positives().count();
            if k > 0 {
                prop_assert!(c.node_count() < 3 * sv.len());
                prop_assert!(c.node_count() < 3 * k);
            }
        }
    }
}

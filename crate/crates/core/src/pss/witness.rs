use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::BitVector;
use crate::circuit::{Circuit, ConnectionConfig, GateKind, NodeRef};
use crate::error::{Error, Result};
use crate::table::TruthTable;

/// Values after polarity at which the gate passes the other operand through,
/// and at which it depends on both: for OR (0,0),(1,0),(0,1); for AND
/// (1,1),(1,0),(0,1).
fn effective_pairs(gate: GateKind) -> [(bool, bool); 3] {
    match gate {
        GateKind::Or => [(false, false), (true, false), (false, true)],
        GateKind::And => [(true, true), (true, false), (false, true)],
    }
}

/// The three (w_L, w_R) value pairs that a node of a minimal circuit must
/// realize somewhere on B^N, as raw values below the edge polarities.
pub fn witness_table(config: ConnectionConfig) -> [(bool, bool); 3] {
    effective_pairs(config.gate)
        .map(|(l, r)| (l ^ config.left.is_negated(), r ^ config.right.is_negated()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTriple {
    #[serde(serialize_with = "ser_config")]
    pub config: ConnectionConfig,
    pub required: [(bool, bool); 3],
    /// First input in row order realizing each required pair.
    #[serde(serialize_with = "ser_found")]
    pub found: [Option<BitVector>; 3],
}

fn ser_config<S: serde::Serializer>(c: &ConnectionConfig, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

fn ser_found<S: serde::Serializer>(f: &[Option<BitVector>; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(3))?;
    for x in f {
        seq.serialize_element(&x.map(|v| v.to_string()))?;
    }
    seq.end()
}

impl WitnessTriple {
    pub fn complete(&self) -> bool {
        self.found.iter().all(Option::is_some)
    }

    /// First required pair with no realizing input.
    pub fn missing(&self) -> Option<(bool, bool)> {
        self.found
            .iter()
            .zip(self.required)
            .find(|(f, _)| f.is_none())
            .map(|(_, p)| p)
    }
}

/// Raw value tables of every input and working node.
pub(crate) struct ValueTables {
    inputs: Vec<TruthTable>,
    nodes: Vec<TruthTable>,
}

impl ValueTables {
    pub fn new(c: &Circuit) -> Result<Self> {
        let n = c.n_inputs();
        if n > TruthTable::DEFAULT_LIMIT {
            return Err(Error::TooManyInputs {
                n,
                limit: TruthTable::DEFAULT_LIMIT,
            });
        }
        Ok(ValueTables {
            inputs: (0..n).map(|j| TruthTable::variable(n, j)).collect(),
            nodes: c.node_tables()?,
        })
    }

    pub fn get(&self, r: NodeRef) -> &TruthTable {
        match r {
            NodeRef::Input(j) => &self.inputs[j],
            NodeRef::Working(k) => &self.nodes[k],
        }
    }
}

/// Witness search at every working node (keys are 0-based node indices).
/// `c` must express `f`.
pub fn check_node_witnesses(c: &Circuit, f: &TruthTable) -> Result<BTreeMap<usize, WitnessTriple>> {
    if c.n_inputs() != f.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: f.n_inputs(),
            found: c.n_inputs(),
        });
    }
    if &c.truth_table()? != f {
        return Err(Error::NotExpressing);
    }
    let mut out = BTreeMap::new();
    if c.is_degenerate() {
        return Ok(out);
    }
    let vals = ValueTables::new(c)?;
    for (k, node) in c.nodes().iter().enumerate() {
        let config = node.config();
        let required = witness_table(config);
        let l = vals.get(node.left.source);
        let r = vals.get(node.right.source);
        let mut found = [None; 3];
        for (slot, pair) in found.iter_mut().zip(required) {
            *slot = BitVector::all(c.n_inputs()).find(|v| (l.at(v), r.at(v)) == pair);
        }
        out.insert(
            k,
            WitnessTriple {
                config,
                required,
                found,
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::fixtures::*;
    use crate::circuit::{Polarity, WorkingNode};

    fn cfg(gate: GateKind, l: bool, r: bool) -> ConnectionConfig {
        ConnectionConfig {
            gate,
            left: Polarity::from_negated(l),
            right: Polarity::from_negated(r),
        }
    }

    const F: bool = false;
    const T: bool = true;

    #[test]
    fn table_matches_lemma_listing() {
        use GateKind::*;
        let expect = [
            (cfg(Or, F, F), [(F, F), (T, F), (F, T)]),
            (cfg(Or, F, T), [(F, T), (T, T), (F, F)]),
            (cfg(Or, T, F), [(T, F), (F, F), (T, T)]),
            (cfg(Or, T, T), [(T, T), (F, T), (T, F)]),
            (cfg(And, F, F), [(T, T), (T, F), (F, T)]),
            (cfg(And, F, T), [(T, F), (T, T), (F, F)]),
            (cfg(And, T, F), [(F, T), (F, F), (T, T)]),
            (cfg(And, T, T), [(F, F), (F, T), (T, F)]),
        ];
        for (c, pairs) in expect {
            assert_eq!(witness_table(c), pairs, "{c}");
        }
    }

    #[test]
    fn pairs_distinct_and_distinguish_branches() {
        for c in ConnectionConfig::all() {
            let p = witness_table(c);
            assert!(p[0] != p[1] && p[1] != p[2] && p[0] != p[2]);
            // the other two pairs each flip one side of the first, the two
            // flips hit different sides, and each flip changes the output
            let base = c.eval(p[0].0, p[0].1);
            let side = |q: (bool, bool)| match ((q.0 != p[0].0), (q.1 != p[0].1)) {
                (true, false) => 0,
                (false, true) => 1,
                _ => panic!("{c}: pair {q:?} is not a single flip"),
            };
            assert_ne!(side(p[1]), side(p[2]));
            assert_ne!(c.eval(p[1].0, p[1].1), base);
            assert_ne!(c.eval(p[2].0, p[2].1), base);
        }
    }

    #[test]
    fn or_node_witnesses() {
        let c = Circuit::from_nodes(2, vec![WorkingNode::or(lit(1), lit(2))]).unwrap();
        let f = c.truth_table().unwrap();
        let w = check_node_witnesses(&c, &f).unwrap();
        let t = &w[&0];
        assert!(t.complete());
        let found: Vec<String> = t.found.iter().map(|x| x.unwrap().to_string()).collect();
        assert_eq!(found, ["00", "10", "01"]);
    }

    #[test]
    fn repeated_operand_misses_a_pair() {
        let c = Circuit::from_nodes(2, vec![WorkingNode::or(lit(1), lit(1))]).unwrap();
        let f = c.truth_table().unwrap();
        let w = check_node_witnesses(&c, &f).unwrap();
        assert_eq!(w[&0].missing(), Some((true, false)));
    }

    #[test]
    fn constant_has_no_nodes() {
        let c = Circuit::constant(2, true);
        assert!(check_node_witnesses(&c, &TruthTable::constant(2, true)).unwrap().is_empty());
        assert!(matches!(
            check_node_witnesses(&c, &TruthTable::constant(2, false)),
            Err(Error::NotExpressing)
        ));
    }

    #[test]
    fn paper_circuits_have_full_witness_sets() {
        for c in [c_f(), c_xor(), c_parity4()] {
            let f = c.truth_table().unwrap();
            assert!(check_node_witnesses(&c, &f).unwrap().values().all(WitnessTriple::complete));
        }
    }
}

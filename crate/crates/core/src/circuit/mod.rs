//! Boolean circuits: DAGs of 2-fanin AND/OR working nodes over inputs
//! b_1..b_N, with negation carried on edges.
//!
//! Indices are 0-based in code (`NodeRef::Input(0)` is b_1, `Working(0)` is
//! g_1) and 1-based in every printed form.

mod levels;
mod matrix;
mod order;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::{BitVector, MAX_INPUTS};
use crate::error::{Error, Result};
use crate::table::TruthTable;

pub use levels::{LevelDecomposition, LevelMatrix, LevelNode};
pub use matrix::{ConnectionMatrix, Entry};
pub use order::CanonicalKey;

/// Chained application of the level matrices.
pub fn eval_by_levels(dec: &LevelDecomposition, v: &BitVector) -> Result<bool> {
    dec.evaluate(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    /// Ordered first: on an exact predecessor tie the OR node precedes.
    Or,
    And,
}

impl GateKind {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::Or => a | b,
            GateKind::And => a & b,
        }
    }

    pub fn apply_words(self, a: u64, b: u64) -> u64 {
        match self {
            GateKind::Or => a | b,
            GateKind::And => a & b,
        }
    }

    pub fn dual(self) -> GateKind {
        match self {
            GateKind::Or => GateKind::And,
            GateKind::And => GateKind::Or,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Direct,
    Negated,
}

impl Polarity {
    pub fn from_negated(negated: bool) -> Self {
        if negated {
            Polarity::Negated
        } else {
            Polarity::Direct
        }
    }

    pub fn is_negated(self) -> bool {
        self == Polarity::Negated
    }

    pub fn apply(self, v: bool) -> bool {
        v ^ self.is_negated()
    }

    pub fn flip(self) -> Polarity {
        Polarity::from_negated(!self.is_negated())
    }
}

/// Source of a connection. Inputs order before working nodes, which makes the
/// derived ordering agree with matrix column positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeRef {
    Input(usize),
    Working(usize),
}

impl NodeRef {
    /// 0-based column position: inputs 0..N, then working nodes.
    pub fn position(self, n_inputs: usize) -> usize {
        match self {
            NodeRef::Input(j) => j,
            NodeRef::Working(k) => n_inputs + k,
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Input(j) => write!(f, "b{}", j + 1),
            NodeRef::Working(k) => write!(f, "g{}", k + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: NodeRef,
    pub polarity: Polarity,
}

impl Edge {
    pub fn new(source: NodeRef, polarity: Polarity) -> Self {
        Edge { source, polarity }
    }

    pub fn input(j: usize) -> Self {
        Edge::new(NodeRef::Input(j), Polarity::Direct)
    }

    pub fn working(k: usize) -> Self {
        Edge::new(NodeRef::Working(k), Polarity::Direct)
    }

    pub fn negate(self) -> Self {
        Edge::new(self.source, self.polarity.flip())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkingNode {
    pub gate: GateKind,
    pub left: Edge,
    pub right: Edge,
}

impl WorkingNode {
    pub fn new(gate: GateKind, left: Edge, right: Edge) -> Self {
        WorkingNode { gate, left, right }
    }

    pub fn and(left: Edge, right: Edge) -> Self {
        WorkingNode::new(GateKind::And, left, right)
    }

    pub fn or(left: Edge, right: Edge) -> Self {
        WorkingNode::new(GateKind::Or, left, right)
    }

    pub fn edges(&self) -> [Edge; 2] {
        [self.left, self.right]
    }

    pub fn config(&self) -> ConnectionConfig {
        ConnectionConfig {
            gate: self.gate,
            left: self.left.polarity,
            right: self.right.polarity,
        }
    }

    /// Same node computing the complement (De Morgan).
    pub fn dual(&self) -> WorkingNode {
        WorkingNode::new(self.gate.dual(), self.left.negate(), self.right.negate())
    }
}

/// One of the 8 (gate, left polarity, right polarity) patterns a node can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConnectionConfig {
    pub gate: GateKind,
    pub left: Polarity,
    pub right: Polarity,
}

impl ConnectionConfig {
    pub fn all() -> [ConnectionConfig; 8] {
        use GateKind::*;
        use Polarity::*;
        let mut out = [ConnectionConfig {
            gate: Or,
            left: Direct,
            right: Direct,
        }; 8];
        let mut i = 0;
        for gate in [Or, And] {
            for (left, right) in [
                (Direct, Direct),
                (Direct, Negated),
                (Negated, Direct),
                (Negated, Negated),
            ] {
                out[i] = ConnectionConfig { gate, left, right };
                i += 1;
            }
        }
        out
    }

    pub fn eval(&self, l: bool, r: bool) -> bool {
        self.gate.apply(self.left.apply(l), self.right.apply(r))
    }
}

impl fmt::Display for ConnectionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.gate {
            GateKind::Or => "|",
            GateKind::And => "&",
        };
        let p = |p: Polarity| if p.is_negated() { "!" } else { "" };
        write!(f, "[{g}{} {g}{}]", p(self.left), p(self.right))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Body {
    Const(bool),
    Literal { input: usize, polarity: Polarity },
    /// Topologically ordered; the last node is the ending node.
    Nodes(Vec<WorkingNode>),
}

/// Structural defect found by [`Circuit::validate`]. Node numbers are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    NoInputs,
    TooManyInputs(usize),
    EmptyNodeList,
    InputOutOfRange { node: Option<usize>, input: usize },
    ForwardReference { node: usize, target: usize },
    Dangling { node: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoInputs => write!(f, "circuit has no inputs"),
            Violation::TooManyInputs(n) => write!(f, "{n} inputs exceed {MAX_INPUTS}"),
            Violation::EmptyNodeList => write!(f, "node list is empty"),
            Violation::InputOutOfRange { node: Some(k), input } => {
                write!(f, "g{k} references missing input b{input}")
            }
            Violation::InputOutOfRange { node: None, input } => {
                write!(f, "literal references missing input b{input}")
            }
            Violation::ForwardReference { node, target } => {
                write!(f, "g{node} references g{target}, which is not earlier")
            }
            Violation::Dangling { node } => {
                write!(f, "g{node} has no outgoing connection and is not the ending node")
            }
        }
    }
}

/// Values at every node for one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeValues {
    pub inputs: Vec<bool>,
    pub nodes: Vec<bool>,
}

impl NodeValues {
    pub fn get(&self, r: NodeRef) -> bool {
        match r {
            NodeRef::Input(j) => self.inputs[j],
            NodeRef::Working(k) => self.nodes[k],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit {
    n_inputs: usize,
    body: Body,
}

impl Circuit {
    /// Builds a circuit, rejecting anything [`Circuit::validate`] flags.
    pub fn new(n_inputs: usize, body: Body) -> Result<Self> {
        let c = Circuit { n_inputs, body };
        let v = c.validate();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidCircuit(v))
        }
    }

    /// Builds without checking; use [`Circuit::validate`] to inspect the result.
    pub fn new_unchecked(n_inputs: usize, body: Body) -> Self {
        Circuit { n_inputs, body }
    }

    pub fn constant(n_inputs: usize, value: bool) -> Self {
        Circuit::new(n_inputs, Body::Const(value)).expect("constant circuit")
    }

    pub fn literal(n_inputs: usize, input: usize, polarity: Polarity) -> Self {
        Circuit::new(n_inputs, Body::Literal { input, polarity }).expect("literal in range")
    }

    pub fn from_nodes(n_inputs: usize, nodes: Vec<WorkingNode>) -> Result<Self> {
        Circuit::new(n_inputs, Body::Nodes(nodes))
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    /// Working nodes; empty for constants and literals.
    pub fn nodes(&self) -> &[WorkingNode] {
        match &self.body {
            Body::Nodes(n) => n,
            _ => &[],
        }
    }

    pub fn is_degenerate(&self) -> bool {
        !matches!(self.body, Body::Nodes(_))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n_inputs;
        if n == 0 {
            out.push(Violation::NoInputs);
        }
        if n > MAX_INPUTS {
            out.push(Violation::TooManyInputs(n));
        }
        match &self.body {
            Body::Const(_) => {}
            Body::Literal { input, .. } => {
                if *input >= n {
                    out.push(Violation::InputOutOfRange {
                        node: None,
                        input: input + 1,
                    });
                }
            }
            Body::Nodes(nodes) => {
                if nodes.is_empty() {
                    out.push(Violation::EmptyNodeList);
                    return out;
                }
                let mut referenced = vec![false; nodes.len()];
                for (i, node) in nodes.iter().enumerate() {
                    for e in node.edges() {
                        match e.source {
                            NodeRef::Input(j) if j >= n => out.push(Violation::InputOutOfRange {
                                node: Some(i + 1),
                                input: j + 1,
                            }),
                            NodeRef::Working(k) if k >= i => {
                                out.push(Violation::ForwardReference {
                                    node: i + 1,
                                    target: k + 1,
                                })
                            }
                            NodeRef::Working(k) => referenced[k] = true,
                            NodeRef::Input(_) => {}
                        }
                    }
                }
                for (k, r) in referenced.iter().enumerate().take(nodes.len() - 1) {
                    if !r {
                        out.push(Violation::Dangling { node: k + 1 });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn check_dim(&self, v: &BitVector) -> Result<()> {
        if v.len() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Propagates `v` through the circuit and returns the value at every node.
    pub fn node_values(&self, v: &BitVector) -> Result<NodeValues> {
        self.check_dim(v)?;
        let inputs: Vec<bool> = v.iter().collect();
        let mut vals = Vec::with_capacity(self.nodes().len());
        for (i, node) in self.nodes().iter().enumerate() {
            let operand = |e: Edge| -> Result<bool> {
                let raw = match e.source {
                    NodeRef::Input(j) => *inputs.get(j).ok_or_else(|| self.invalid())?,
                    NodeRef::Working(k) if k < i => vals[k],
                    NodeRef::Working(_) => return Err(self.invalid()),
                };
                Ok(e.polarity.apply(raw))
            };
            let l = operand(node.left)?;
            let r = operand(node.right)?;
            vals.push(node.gate.apply(l, r));
        }
        Ok(NodeValues {
            inputs,
            nodes: vals,
        })
    }

    fn invalid(&self) -> Error {
        Error::InvalidCircuit(self.validate())
    }

    pub fn evaluate(&self, v: &BitVector) -> Result<bool> {
        self.check_dim(v)?;
        match &self.body {
            Body::Const(b) => Ok(*b),
            Body::Literal { input, polarity } => {
                if *input >= self.n_inputs {
                    return Err(self.invalid());
                }
                Ok(polarity.apply(v.get(*input)))
            }
            Body::Nodes(_) => {
                let vals = self.node_values(v)?;
                vals.nodes.last().copied().ok_or_else(|| self.invalid())
            }
        }
    }

    /// d(C): number of AND/OR nodes.
    pub fn node_count(&self) -> usize {
        self.nodes().len()
    }

    /// s(C): d(C) plus one NOT gate per negated connection.
    pub fn gate_size(&self) -> usize {
        match &self.body {
            Body::Const(_) => 0,
            Body::Literal { polarity, .. } => polarity.is_negated() as usize,
            Body::Nodes(nodes) => {
                nodes.len()
                    + nodes
                        .iter()
                        .flat_map(|n| n.edges())
                        .filter(|e| e.polarity.is_negated())
                        .count()
            }
        }
    }

    /// Level of each working node: one more than its deepest operand, with
    /// inputs at level 0.
    pub fn node_levels(&self) -> Vec<usize> {
        let mut lv: Vec<usize> = Vec::with_capacity(self.nodes().len());
        for node in self.nodes() {
            let l = node
                .edges()
                .iter()
                .map(|e| match e.source {
                    NodeRef::Input(_) => 0,
                    NodeRef::Working(k) => lv[k],
                })
                .max()
                .unwrap_or(0);
            lv.push(l + 1);
        }
        lv
    }

    /// Number of levels; 0 for constants and literals.
    pub fn depth(&self) -> usize {
        self.node_levels().into_iter().max().unwrap_or(0)
    }

    /// Full truth table by bit-parallel simulation.
    pub fn truth_table(&self) -> Result<TruthTable> {
        self.truth_table_limited(TruthTable::DEFAULT_LIMIT)
    }

    pub fn truth_table_limited(&self, limit: usize) -> Result<TruthTable> {
        if self.n_inputs > limit {
            return Err(Error::TooManyInputs {
                n: self.n_inputs,
                limit,
            });
        }
        if !self.is_valid() {
            return Err(self.invalid());
        }
        let n = self.n_inputs;
        Ok(match &self.body {
            Body::Const(b) => TruthTable::constant(n, *b),
            Body::Literal { input, polarity } => {
                let t = TruthTable::variable(n, *input);
                if polarity.is_negated() {
                    t.not()
                } else {
                    t
                }
            }
            Body::Nodes(_) => self.node_tables()?.pop().expect("nonempty"),
        })
    }

    /// Truth table of every working node (requires a valid circuit).
    pub fn node_tables(&self) -> Result<Vec<TruthTable>> {
        let n = self.n_inputs;
        if n > TruthTable::DEFAULT_LIMIT {
            return Err(Error::TooManyInputs {
                n,
                limit: TruthTable::DEFAULT_LIMIT,
            });
        }
        let vars: Vec<TruthTable> = (0..n).map(|j| TruthTable::variable(n, j)).collect();
        let mut tables: Vec<TruthTable> = Vec::with_capacity(self.nodes().len());
        for (i, node) in self.nodes().iter().enumerate() {
            let fetch = |e: Edge, tables: &[TruthTable]| -> Result<TruthTable> {
                let t = match e.source {
                    NodeRef::Input(j) if j < n => vars[j].clone(),
                    NodeRef::Working(k) if k < i => tables[k].clone(),
                    _ => return Err(self.invalid()),
                };
                Ok(if e.polarity.is_negated() { t.not() } else { t })
            };
            let l = fetch(node.left, &tables)?;
            let r = fetch(node.right, &tables)?;
            tables.push(l.combine(&r, node.gate));
        }
        Ok(tables)
    }

    /// A circuit with the same node count computing the complement.
    pub fn complement(&self) -> Circuit {
        let body = match &self.body {
            Body::Const(b) => Body::Const(!b),
            Body::Literal { input, polarity } => Body::Literal {
                input: *input,
                polarity: polarity.flip(),
            },
            Body::Nodes(nodes) => {
                let mut nodes = nodes.clone();
                let last = nodes.len() - 1;
                nodes[last] = nodes[last].dual();
                Body::Nodes(nodes)
            }
        };
        Circuit::new_unchecked(self.n_inputs, body)
    }

    /// Indices of working nodes reachable from the ending node.
    pub(crate) fn live_mask(nodes: &[WorkingNode]) -> Vec<bool> {
        let mut live = vec![false; nodes.len()];
        if let Some(last) = live.last_mut() {
            *last = true;
        }
        for i in (0..nodes.len()).rev() {
            if !live[i] {
                continue;
            }
            for e in nodes[i].edges() {
                if let NodeRef::Working(k) = e.source {
                    live[k] = true;
                }
            }
        }
        live
    }

    /// Drops nodes the ending node cannot reach, renumbering the rest.
    pub fn prune_dead(n_inputs: usize, nodes: Vec<WorkingNode>) -> Circuit {
        if nodes.is_empty() {
            return Circuit::new_unchecked(n_inputs, Body::Nodes(nodes));
        }
        let live = Self::live_mask(&nodes);
        let mut map = vec![usize::MAX; nodes.len()];
        let mut out = Vec::new();
        for (i, node) in nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let remap = |e: Edge| match e.source {
                NodeRef::Working(k) => Edge::new(NodeRef::Working(map[k]), e.polarity),
                _ => e,
            };
            let w = WorkingNode::new(node.gate, remap(node.left), remap(node.right));
            map[i] = out.len();
            out.push(w);
        }
        Circuit::new_unchecked(n_inputs, Body::Nodes(out))
    }
}

impl fmt::Display for Circuit {
    /// Infix form, e.g. `b1 | (b2 & !b3)`. Shared nodes are printed inline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn edge(nodes: &[WorkingNode], e: Edge, out: &mut String) {
            if e.polarity.is_negated() {
                out.push('!');
            }
            match e.source {
                NodeRef::Input(j) => out.push_str(&format!("b{}", j + 1)),
                NodeRef::Working(k) => {
                    out.push('(');
                    node(nodes, k, out);
                    out.push(')');
                }
            }
        }
        fn node(nodes: &[WorkingNode], k: usize, out: &mut String) {
            let n = &nodes[k];
            edge(nodes, n.left, out);
            out.push_str(match n.gate {
                GateKind::Or => " | ",
                GateKind::And => " & ",
            });
            edge(nodes, n.right, out);
        }
        match &self.body {
            Body::Const(b) => write!(f, "{}", *b as u8),
            Body::Literal { input, polarity } => {
                write!(f, "{}b{}", if polarity.is_negated() { "!" } else { "" }, input + 1)
            }
            Body::Nodes(nodes) => {
                let mut s = String::new();
                node(nodes, nodes.len() - 1, &mut s);
                f.write_str(&s)
            }
        }
    }
}

/// Worked circuits: C_f, XOR, parity of four and the five-level example.
/// Edge helpers take 1-based indices.
pub mod fixtures {
    use super::*;

    pub fn lit(j: usize) -> Edge {
        Edge::input(j - 1)
    }
    pub fn nlit(j: usize) -> Edge {
        Edge::input(j - 1).negate()
    }
    pub fn g(k: usize) -> Edge {
        Edge::working(k - 1)
    }
    pub fn ng(k: usize) -> Edge {
        Edge::working(k - 1).negate()
    }

    /// b1 | (b2 & !b3)
    pub fn c_f() -> Circuit {
        Circuit::from_nodes(
            3,
            vec![WorkingNode::and(lit(2), nlit(3)), WorkingNode::or(lit(1), g(1))],
        )
        .unwrap()
    }

    /// (b1 | b2) & !(b1 & b2)
    pub fn c_xor() -> Circuit {
        Circuit::from_nodes(
            2,
            vec![
                WorkingNode::or(lit(1), lit(2)),
                WorkingNode::and(lit(1), lit(2)),
                WorkingNode::and(g(1), ng(2)),
            ],
        )
        .unwrap()
    }

    /// Parity of 4 as (b1 ^ b2) ^ (b3 ^ b4), 9 nodes in natural order.
    pub fn c_parity4() -> Circuit {
        Circuit::from_nodes(
            4,
            vec![
                WorkingNode::or(lit(1), lit(2)),
                WorkingNode::and(lit(1), lit(2)),
                WorkingNode::or(lit(3), lit(4)),
                WorkingNode::and(lit(3), lit(4)),
                WorkingNode::and(g(1), ng(2)),
                WorkingNode::and(g(3), ng(4)),
                WorkingNode::or(g(5), g(6)),
                WorkingNode::and(g(5), g(6)),
                WorkingNode::and(g(7), ng(8)),
            ],
        )
        .unwrap()
    }

    /// (b1 | (b2 & b4)) ^ (b2 | (b3 ^ b4)), the 5-level example.
    pub fn c_five_level() -> Circuit {
        Circuit::from_nodes(
            4,
            vec![
                WorkingNode::and(lit(2), lit(4)),
                WorkingNode::or(lit(3), lit(4)),
                WorkingNode::and(lit(3), lit(4)),
                WorkingNode::or(lit(1), g(1)),
                WorkingNode::and(g(2), ng(3)),
                WorkingNode::or(lit(2), g(5)),
                WorkingNode::or(g(4), g(6)),
                WorkingNode::and(g(4), g(6)),
                WorkingNode::and(g(7), ng(8)),
            ],
        )
        .unwrap()
    }
}

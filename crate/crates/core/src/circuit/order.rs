use super::{Body, Circuit, Edge, GateKind, NodeRef, Polarity, WorkingNode};

/// Total order used to pick a reproducible representative among circuits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CanonicalKey {
    Const(bool),
    Literal(usize, Polarity),
    Nodes(Vec<(usize, usize, GateKind, Polarity, Polarity)>),
}

type NodeKey = (usize, usize, GateKind, Polarity, Polarity);

fn node_key(node: &WorkingNode, pos: impl Fn(NodeRef) -> usize) -> (NodeKey, Edge, Edge) {
    let a = (pos(node.left.source), node.left.polarity, node.left);
    let b = (pos(node.right.source), node.right.polarity, node.right);
    let (lo, hi) = if (a.0, a.1) <= (b.0, b.1) { (a, b) } else { (b, a) };
    ((lo.0, hi.0, node.gate, lo.1, hi.1), lo.2, hi.2)
}

impl Circuit {
    /// Reorders working nodes level by level; within a level by the
    /// predecessor positions (lower first), OR before AND, then Direct before
    /// Negated. Operands are stored lower position first.
    pub fn natural_order(&self) -> Circuit {
        let nodes = match self.body() {
            Body::Nodes(nodes) => nodes,
            _ => return self.clone(),
        };
        let n = self.n_inputs();
        let levels = self.node_levels();
        let depth = levels.iter().copied().max().unwrap_or(0);
        let mut new_index = vec![usize::MAX; nodes.len()];
        let mut out: Vec<WorkingNode> = Vec::with_capacity(nodes.len());
        for level in 1..=depth {
            let pos = |r: NodeRef| match r {
                NodeRef::Input(j) => j,
                NodeRef::Working(k) => n + new_index[k],
            };
            let mut batch: Vec<(NodeKey, usize, Edge, Edge)> = (0..nodes.len())
                .filter(|&i| levels[i] == level)
                .map(|i| {
                    let (key, lo, hi) = node_key(&nodes[i], pos);
                    (key, i, lo, hi)
                })
                .collect();
            batch.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
            let remap = |e: Edge, new_index: &[usize]| match e.source {
                NodeRef::Working(k) => Edge::new(NodeRef::Working(new_index[k]), e.polarity),
                NodeRef::Input(_) => e,
            };
            for (_, old, lo, hi) in batch {
                let node = WorkingNode::new(nodes[old].gate, remap(lo, &new_index), remap(hi, &new_index));
                new_index[old] = out.len();
                out.push(node);
            }
        }
        Circuit::new_unchecked(n, Body::Nodes(out))
    }

    /// Rewrites internal nodes with De Morgan wherever that lowers the number
    /// of negated connections, then puts the result in natural order. The
    /// computed function and node count are unchanged.
    pub fn tidy(&self) -> Circuit {
        let mut nodes = match self.body() {
            Body::Nodes(nodes) => nodes.clone(),
            _ => return self.clone(),
        };
        let last = nodes.len() - 1;
        for i in 0..last {
            let score = |e: &Edge| if e.polarity.is_negated() { -1i64 } else { 1 };
            let inward: i64 = nodes[i].edges().iter().map(score).sum();
            let outward: i64 = nodes[i + 1..]
                .iter()
                .flat_map(|n| n.edges())
                .filter(|e| e.source == NodeRef::Working(i))
                .map(|e| score(&e))
                .sum();
            if inward + outward < 0 {
                nodes[i] = nodes[i].dual();
                for node in &mut nodes[i + 1..] {
                    for e in [&mut node.left, &mut node.right] {
                        if e.source == NodeRef::Working(i) {
                            *e = e.negate();
                        }
                    }
                }
            }
        }
        Circuit::new_unchecked(self.n_inputs(), Body::Nodes(nodes)).natural_order()
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let n = self.n_inputs();
        match self.body() {
            Body::Const(b) => CanonicalKey::Const(*b),
            Body::Literal { input, polarity } => CanonicalKey::Literal(*input, *polarity),
            Body::Nodes(nodes) => CanonicalKey::Nodes(
                nodes
                    .iter()
                    .map(|node| node_key(node, |r| r.position(n)).0)
                    .collect(),
            ),
        }
    }
}

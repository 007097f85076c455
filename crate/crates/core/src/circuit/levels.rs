use std::fmt;

use super::{Body, Circuit, Entry, NodeRef};
use crate::bits::BitVector;
use crate::error::{Error, Result};

/// A row of a level: either a real working node (by index into the source
/// circuit) or a spurious node forwarding `NodeRef`'s raw value upward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LevelNode {
    Gate(usize),
    Spurious(NodeRef),
}

impl fmt::Display for LevelNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelNode::Gate(k) => write!(f, "g{}", k + 1),
            LevelNode::Spurious(r) => write!(f, "s({r})"),
        }
    }
}

/// Connections from one level to the next; rows are the nodes of the upper
/// level, columns those of the level below (the inputs for the first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelMatrix {
    pub rows: Vec<Vec<Entry>>,
}

impl LevelMatrix {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Applies the matrix to the values of the level below.
    pub fn apply(&self, below: &[bool]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|row| {
                let mut gate = None;
                let mut operands = row.iter().zip(below).filter(|(e, _)| !e.is_zero()).map(|(e, &v)| {
                    if let Some(g) = e.gate() {
                        gate = Some(g);
                    }
                    e.polarity().expect("non-zero").apply(v)
                });
                let a = operands.next().expect("row has an entry");
                match operands.next() {
                    None => a,
                    Some(b) => gate.expect("gate row").apply(a, b),
                }
            })
            .collect()
    }
}

impl fmt::Display for LevelMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let syms: Vec<&str> = row.iter().map(|e| e.symbol()).collect();
            f.write_str(&syms.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelDecomposition {
    n_inputs: usize,
    /// `levels[i]` is level i+1.
    levels: Vec<Vec<LevelNode>>,
    matrices: Vec<LevelMatrix>,
}

impl LevelDecomposition {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<LevelNode>] {
        &self.levels
    }

    pub fn matrices(&self) -> &[LevelMatrix] {
        &self.matrices
    }

    /// Spurious nodes as (level, forwarded source), level 1-based.
    pub fn spurious(&self) -> Vec<(usize, NodeRef)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(i, lv)| {
                lv.iter().filter_map(move |n| match n {
                    LevelNode::Spurious(r) => Some((i + 1, *r)),
                    LevelNode::Gate(_) => None,
                })
            })
            .collect()
    }

    /// Values at every level after chained matrix application; the last
    /// entry holds the single ending-node value.
    pub fn trace(&self, v: &BitVector) -> Result<Vec<Vec<bool>>> {
        if v.len() != self.n_inputs {
            return Err(Error::DimensionMismatch {
                expected: self.n_inputs,
                found: v.len(),
            });
        }
        let mut cur: Vec<bool> = v.iter().collect();
        let mut out = Vec::with_capacity(self.matrices.len());
        for m in &self.matrices {
            cur = m.apply(&cur);
            out.push(cur.clone());
        }
        Ok(out)
    }

    pub fn evaluate(&self, v: &BitVector) -> Result<bool> {
        let trace = self.trace(v)?;
        Ok(trace.last().expect("at least one level")[0])
    }

    /// Text dump: `K=<k>` then one labeled block per matrix.
    pub fn dump(&self) -> String {
        let mut s = format!("K={}\n", self.depth());
        for (i, m) in self.matrices.iter().enumerate() {
            s.push_str(&format!("M{} {}x{}\n", i + 1, m.row_count(), m.col_count()));
            s.push_str(&m.to_string());
            s.push('\n');
        }
        s
    }
}

impl Circuit {
    /// Splits the circuit into levels, inserting spurious pass-through nodes
    /// wherever a connection skips a level. Nodes of each lower level are
    /// listed in the order the level above first consumes them.
    pub fn decompose_levels(&self) -> Result<LevelDecomposition> {
        let nodes = match self.body() {
            Body::Nodes(nodes) => nodes,
            _ => return Err(Error::Degenerate),
        };
        let v = self.validate();
        if !v.is_empty() {
            return Err(Error::InvalidCircuit(v));
        }
        let n = self.n_inputs();
        let lv = self.node_levels();
        let depth = *lv.last().expect("nonempty");
        let level_of = |r: NodeRef| match r {
            NodeRef::Input(_) => 0,
            NodeRef::Working(k) => lv[k],
        };
        let operands = |node: &LevelNode| -> Vec<NodeRef> {
            match node {
                LevelNode::Gate(k) => vec![nodes[*k].left.source, nodes[*k].right.source],
                LevelNode::Spurious(r) => vec![*r],
            }
        };
        // Representative of `r` as seen from level `at`.
        let rep = |r: NodeRef, at: usize| -> LevelNode {
            match r {
                NodeRef::Working(k) if lv[k] == at => LevelNode::Gate(k),
                _ => LevelNode::Spurious(r),
            }
        };

        let mut levels: Vec<Vec<LevelNode>> = vec![Vec::new(); depth];
        levels[depth - 1].push(LevelNode::Gate(nodes.len() - 1));
        for i in (2..=depth).rev() {
            let mut below: Vec<LevelNode> = Vec::new();
            for node in &levels[i - 1] {
                for r in operands(node) {
                    debug_assert!(level_of(r) < i);
                    let rn = rep(r, i - 1);
                    if !below.contains(&rn) {
                        below.push(rn);
                    }
                }
            }
            levels[i - 2] = below;
        }

        let mut matrices = Vec::with_capacity(depth);
        for i in 1..=depth {
            let column = |r: NodeRef| -> usize {
                if i == 1 {
                    match r {
                        NodeRef::Input(j) => j,
                        NodeRef::Working(_) => unreachable!("level 1 reads inputs only"),
                    }
                } else {
                    let target = rep(r, i - 1);
                    levels[i - 2]
                        .iter()
                        .position(|x| *x == target)
                        .expect("operand present on level below")
                }
            };
            let cols = if i == 1 { n } else { levels[i - 2].len() };
            let mut rows = Vec::with_capacity(levels[i - 1].len());
            for node in &levels[i - 1] {
                let mut row = vec![Entry::Zero; cols];
                match node {
                    LevelNode::Gate(k) => {
                        let w = &nodes[*k];
                        if w.left.source == w.right.source {
                            return Err(Error::RepeatedOperand { node: k + 1 });
                        }
                        for e in w.edges() {
                            row[column(e.source)] = Entry::connection(w.gate, e.polarity);
                        }
                    }
                    LevelNode::Spurious(r) => row[column(*r)] = Entry::Pass,
                }
                rows.push(row);
            }
            matrices.push(LevelMatrix { rows });
        }
        Ok(LevelDecomposition {
            n_inputs: n,
            levels,
            matrices,
        })
    }
}

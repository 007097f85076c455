use std::fmt;
use std::str::FromStr;

use super::{Body, Circuit, Edge, GateKind, NodeRef, Polarity, WorkingNode};
use crate::error::{Error, ParseError, Result};

/// Matrix symbol. `Pass` only appears in per-level matrices, where it marks a
/// spurious node forwarding a single value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entry {
    Zero,
    And,
    AndNeg,
    Or,
    OrNeg,
    Pass,
}

impl Entry {
    pub fn connection(gate: GateKind, polarity: Polarity) -> Entry {
        match (gate, polarity) {
            (GateKind::And, Polarity::Direct) => Entry::And,
            (GateKind::And, Polarity::Negated) => Entry::AndNeg,
            (GateKind::Or, Polarity::Direct) => Entry::Or,
            (GateKind::Or, Polarity::Negated) => Entry::OrNeg,
        }
    }

    pub fn gate(self) -> Option<GateKind> {
        match self {
            Entry::And | Entry::AndNeg => Some(GateKind::And),
            Entry::Or | Entry::OrNeg => Some(GateKind::Or),
            _ => None,
        }
    }

    pub fn polarity(self) -> Option<Polarity> {
        match self {
            Entry::And | Entry::Or | Entry::Pass => Some(Polarity::Direct),
            Entry::AndNeg | Entry::OrNeg => Some(Polarity::Negated),
            Entry::Zero => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Entry::Zero
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Entry::Zero => "0",
            Entry::And => "&",
            Entry::AndNeg => "&!",
            Entry::Or => "|",
            Entry::OrNeg => "|!",
            Entry::Pass => "s",
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Entry {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        Ok(match s {
            "0" => Entry::Zero,
            "&" => Entry::And,
            "&!" => Entry::AndNeg,
            "|" => Entry::Or,
            "|!" => Entry::OrNeg,
            "s" => Entry::Pass,
            other => return Err(ParseError::new(1, 1, format!("unknown matrix symbol '{other}'"))),
        })
    }
}

/// d × (N+d−1) encoding of a circuit: row i holds the two incoming
/// connections of g_i, columns address b_1..b_N then g_1..g_{d−1}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ConnectionMatrix {
    n_inputs: usize,
    rows: Vec<Vec<Entry>>,
}

impl ConnectionMatrix {
    /// Checks every matrix invariant; errors carry 1-based coordinates.
    pub fn new(n_inputs: usize, rows: Vec<Vec<Entry>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::Degenerate);
        }
        let cols = n_inputs + d - 1;
        let mut column_used = vec![false; cols];
        for (i, row) in rows.iter().enumerate() {
            let row_err = |message: String| Error::MatrixRow { row: i + 1, message };
            if row.len() != cols {
                return Err(row_err(format!("has {} columns, expected {cols}", row.len())));
            }
            let nonzero: Vec<(usize, Entry)> = row
                .iter()
                .copied()
                .enumerate()
                .filter(|(_, e)| !e.is_zero())
                .collect();
            if nonzero.len() != 2 {
                return Err(row_err(format!(
                    "has {} non-zero entries, expected exactly 2",
                    nonzero.len()
                )));
            }
            if let Some((c, _)) = nonzero.iter().find(|(_, e)| *e == Entry::Pass) {
                return Err(row_err(format!("column {}: 's' is only valid in level matrices", c + 1)));
            }
            if nonzero[0].1.gate() != nonzero[1].1.gate() {
                return Err(row_err(format!(
                    "mixes gate kinds in columns {} and {}",
                    nonzero[0].0 + 1,
                    nonzero[1].0 + 1
                )));
            }
            for &(c, _) in &nonzero {
                if c >= n_inputs && c - n_inputs >= i {
                    return Err(row_err(format!(
                        "column {} references g{}, which is not earlier",
                        c + 1,
                        c - n_inputs + 1
                    )));
                }
                column_used[c] = true;
            }
        }
        // Input columns may be empty: a circuit need not read every input.
        if let Some(c) = (n_inputs..cols).find(|&c| !column_used[c]) {
            return Err(Error::MatrixColumn {
                column: c + 1,
                message: format!("g{} has no outgoing connection", c - n_inputs + 1),
            });
        }
        Ok(ConnectionMatrix { n_inputs, rows })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.n_inputs + self.rows.len() - 1
    }

    pub fn rows(&self) -> &[Vec<Entry>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> Entry {
        self.rows[row][col]
    }
}

impl fmt::Display for ConnectionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let line: Vec<&str> = row.iter().map(|e| e.symbol()).collect();
            f.write_str(&line.join(" "))?;
        }
        Ok(())
    }
}

impl Circuit {
    /// Connection matrix in the circuit's current node order.
    pub fn to_connection_matrix(&self) -> Result<ConnectionMatrix> {
        let nodes = match self.body() {
            Body::Nodes(nodes) => nodes,
            _ => return Err(Error::Degenerate),
        };
        let v = self.validate();
        if !v.is_empty() {
            return Err(Error::InvalidCircuit(v));
        }
        let n = self.n_inputs();
        let cols = n + nodes.len() - 1;
        let mut rows = Vec::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if node.left.source == node.right.source {
                return Err(Error::RepeatedOperand { node: i + 1 });
            }
            let mut row = vec![Entry::Zero; cols];
            for e in node.edges() {
                row[e.source.position(n)] = Entry::connection(node.gate, e.polarity);
            }
            rows.push(row);
        }
        ConnectionMatrix::new(n, rows)
    }

    /// Rebuilds a circuit; the lower column becomes the left operand.
    pub fn from_connection_matrix(m: &ConnectionMatrix) -> Result<Circuit> {
        let n = m.n_inputs();
        let source = |c: usize| {
            if c < n {
                NodeRef::Input(c)
            } else {
                NodeRef::Working(c - n)
            }
        };
        let nodes = m
            .rows()
            .iter()
            .map(|row| {
                let mut edges = row.iter().enumerate().filter(|(_, e)| !e.is_zero()).map(|(c, e)| {
                    (Edge::new(source(c), e.polarity().expect("non-zero")), e.gate().expect("gate"))
                });
                let (l, gate) = edges.next().expect("two entries");
                let (r, _) = edges.next().expect("two entries");
                WorkingNode::new(gate, l, r)
            })
            .collect();
        Circuit::from_nodes(n, nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::bits::BitVector;

    fn matrix_text(c: &Circuit) -> String {
        c.to_connection_matrix().unwrap().to_string()
    }

    #[test]
    fn c_f_matrix() {
        assert_eq!(matrix_text(&c_f()), "0 & &! 0\n| 0 0 |");
    }

    #[test]
    fn xor_matrix() {
        assert_eq!(matrix_text(&c_xor()), "| | 0 0\n& & 0 0\n0 0 & &!");
    }

    #[test]
    fn parity_matrix_shape() {
        let m = c_parity4().to_connection_matrix().unwrap();
        assert_eq!((m.row_count(), m.col_count()), (9, 12));
        assert_eq!(m.get(8, 10), Entry::And);
        assert_eq!(m.get(8, 11), Entry::AndNeg);
    }

    #[test]
    fn from_matrix_rebuilds_c_f() {
        let m = c_f().to_connection_matrix().unwrap();
        let back = Circuit::from_connection_matrix(&m).unwrap();
        for v in BitVector::all(3) {
            let expected = v.get(0) || (v.get(1) && !v.get(2));
            assert_eq!(back.evaluate(&v).unwrap(), expected);
        }
    }

    #[test]
    fn single_or_row() {
        let m = ConnectionMatrix::new(2, vec![vec![Entry::Or, Entry::Or]]).unwrap();
        let c = Circuit::from_connection_matrix(&m).unwrap();
        assert_eq!(c.to_string(), "b1 | b2");
    }

    #[test]
    fn rejects_three_entry_row() {
        let err = ConnectionMatrix::new(3, vec![vec![Entry::Or, Entry::Or, Entry::Or]]).unwrap_err();
        assert!(matches!(err, Error::MatrixRow { row: 1, .. }));
    }

    #[test]
    fn rejects_mixed_row_and_unused_node_column() {
        let mixed = ConnectionMatrix::new(2, vec![vec![Entry::And, Entry::Or]]);
        assert!(matches!(mixed, Err(Error::MatrixRow { row: 1, .. })));
        let unused = ConnectionMatrix::new(
            2,
            vec![
                vec![Entry::And, Entry::And, Entry::Zero],
                vec![Entry::Or, Entry::Or, Entry::Zero],
            ],
        );
        assert!(matches!(unused, Err(Error::MatrixColumn { column: 3, .. })));
    }

    #[test]
    fn repeated_operand_has_no_matrix() {
        let c = Circuit::from_nodes(1, vec![WorkingNode::or(lit(1), lit(1))]).unwrap();
        assert!(matches!(c.to_connection_matrix(), Err(Error::RepeatedOperand { node: 1 })));
        assert!(matches!(
            Circuit::constant(2, true).to_connection_matrix(),
            Err(Error::Degenerate)
        ));
    }
}

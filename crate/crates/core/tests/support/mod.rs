//! Shared test helpers: an independent brute-force reference for minimal
//! node counts, and small builders.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use fitex::{BitVector, SampleSet, TruthTable};

/// Largest node count the reference enumerates.
pub const ORACLE_DEPTH: usize = 4;

/// Minimum node count of every function on B^n (packed table index), found
/// by enumerating every syntactic circuit with up to ORACLE_DEPTH nodes,
/// dead nodes and repeated operands included. `None` means more than
/// ORACLE_DEPTH nodes.
pub struct Oracle {
    pub n: usize,
    pub cost: Vec<Option<usize>>,
}

fn var_table(n: usize, j: usize) -> u64 {
    let mut t = 0u64;
    for row in 0..(1u64 << n) {
        if (row >> j) & 1 == 1 {
            t |= 1 << row;
        }
    }
    t
}

impl Oracle {
    fn build(n: usize) -> Oracle {
        let rows = 1usize << n;
        let mask: u64 = if rows == 64 { u64::MAX } else { (1u64 << rows) - 1 };
        let mut cost: Vec<Option<usize>> = vec![None; 1 << rows];
        cost[0] = Some(0);
        cost[mask as usize] = Some(0);
        let vars: Vec<u64> = (0..n).map(|j| var_table(n, j)).collect();
        for &v in &vars {
            cost[v as usize] = Some(0);
            cost[(!v & mask) as usize] = Some(0);
        }
        for d in 1..=ORACLE_DEPTH {
            let mut avail = vars.clone();
            let mut reached = vec![false; 1 << rows];
            rec(&mut avail, d, mask, &mut reached);
            for (t, hit) in reached.iter().enumerate() {
                if *hit && cost[t].is_none() {
                    cost[t] = Some(d);
                }
            }
        }
        Oracle { n, cost }
    }

    pub fn for_dim(n: usize) -> &'static Oracle {
        static O2: OnceLock<Oracle> = OnceLock::new();
        static O3: OnceLock<Oracle> = OnceLock::new();
        match n {
            2 => O2.get_or_init(|| Oracle::build(2)),
            3 => O3.get_or_init(|| Oracle::build(3)),
            _ => panic!("reference only covers N = 2, 3"),
        }
    }

    pub fn cost_of(&self, f: &TruthTable) -> Option<usize> {
        self.cost[f.as_u64().unwrap() as usize]
    }

    /// (d_min, classes) for a valued sample set; `None` when every
    /// consistent function needs more than ORACLE_DEPTH nodes.
    pub fn solve(&self, sv: &SampleSet) -> Option<(usize, BTreeSet<TruthTable>)> {
        let rows = 1usize << self.n;
        let mut best: Option<usize> = None;
        let mut classes = BTreeSet::new();
        for t in 0..(1u64 << rows) {
            let f = TruthTable::from_u64(self.n, t);
            if !sv.agrees_with(&f) {
                continue;
            }
            if let Some(c) = self.cost[t as usize] {
                match best {
                    Some(b) if c > b => {}
                    Some(b) if c == b => {
                        classes.insert(f);
                    }
                    _ => {
                        best = Some(c);
                        classes = BTreeSet::from([f]);
                    }
                }
            }
        }
        best.map(|b| (b, classes))
    }
}

/// Every circuit with `left` more nodes on top of the tables in `avail`;
/// records the value of the last node placed.
fn rec(avail: &mut Vec<u64>, left: usize, mask: u64, reached: &mut [bool]) {
    let m = avail.len();
    for i in 0..m {
        for j in 0..m {
            for pi in [false, true] {
                for pj in [false, true] {
                    let x = if pi { !avail[i] & mask } else { avail[i] };
                    let y = if pj { !avail[j] & mask } else { avail[j] };
                    for t in [x & y, x | y] {
                        if left == 1 {
                            reached[t as usize] = true;
                        } else {
                            avail.push(t);
                            rec(avail, left - 1, mask, reached);
                            avail.pop();
                        }
                    }
                }
            }
        }
    }
}

pub fn bv(s: &str) -> BitVector {
    s.parse().unwrap()
}

pub fn table(s: &str) -> TruthTable {
    s.parse().unwrap()
}

pub fn points(list: &[&str]) -> Vec<BitVector> {
    list.iter().map(|s| bv(s)).collect()
}

//! Exhaustive search for circuits with exactly `k` new nodes over a fixed set
//! of leaves, matching a target signature on the samples.
//!
//! Non-ending nodes are AND gates only: an OR node is an AND of complemented
//! operands whose consumers flip their edge polarity, so this loses no
//! function. Nodes constant on the samples, or equal (up to complement) to a
//! free leaf or an earlier node, are rejected; such circuits always shrink to
//! a smaller fitting one. Independent adjacent nodes must appear in
//! increasing signature order, and every node must end up consumed.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::circuit::{CanonicalKey, Circuit, GateKind, Polarity};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Leaf {
    pub sig: u128,
    pub table: u64,
    pub cost: usize,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Node {
    pub a: usize,
    pub b: usize,
    pub na: bool,
    pub nb: bool,
    pub gate: GateKind,
    sig: u128,
    table: u64,
}

pub(crate) enum Raw<'a> {
    Const(bool),
    Leaf(usize, Polarity),
    Nodes(&'a [Node]),
}

pub(crate) type Builder<'a> = dyn Fn(Raw<'_>) -> Circuit + Sync + 'a;

pub(crate) struct Search<'a> {
    pub leaves: &'a [Leaf],
    pub mask: u128,
    pub table_mask: u64,
    pub target: u128,
    pub track_tables: bool,
    pub build: &'a Builder<'a>,
}

#[derive(Default)]
pub(crate) struct Outcome {
    pub best: Option<(CanonicalKey, Circuit)>,
    pub classes: BTreeMap<u64, (CanonicalKey, Circuit)>,
    pub examined: u64,
    pub pruned: u64,
    pub fits: u64,
}

impl Outcome {
    pub fn found(&self) -> bool {
        self.best.is_some()
    }

    fn offer(&mut self, c: Circuit, table: u64, track: bool) {
        let c = c.tidy();
        let key = c.canonical_key();
        self.fits += 1;
        if track {
            match self.classes.get(&table) {
                Some((k, _)) if *k <= key => {}
                _ => {
                    self.classes.insert(table, (key.clone(), c.clone()));
                }
            }
        }
        if self.best.as_ref().is_none_or(|(k, _)| key < *k) {
            self.best = Some((key, c));
        }
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.examined += other.examined;
        self.pruned += other.pruned;
        self.fits += other.fits;
        for (t, (k, c)) in other.classes {
            match self.classes.get(&t) {
                Some((mine, _)) if *mine <= k => {}
                _ => {
                    self.classes.insert(t, (k, c));
                }
            }
        }
        if let Some((k, c)) = other.best {
            if self.best.as_ref().is_none_or(|(mine, _)| k < *mine) {
                self.best = Some((k, c));
            }
        }
        self
    }
}

#[derive(Clone)]
struct State {
    nodes: Vec<Node>,
    uses: Vec<u8>,
    unused: usize,
    leaf_used: Vec<bool>,
    extra: usize,
}

fn pool(threads: usize) -> Arc<rayon::ThreadPool> {
    static POOLS: OnceLock<Mutex<HashMap<usize, Arc<rayon::ThreadPool>>>> = OnceLock::new();
    let mut map = POOLS.get_or_init(Default::default).lock().expect("pool cache");
    map.entry(threads)
        .or_insert_with(|| {
            Arc::new(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .expect("thread pool"),
            )
        })
        .clone()
}

const POLS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

impl<'a> Search<'a> {
    fn norm(&self, s: u128) -> u128 {
        s.min(!s & self.mask)
    }

    fn pol_sig(&self, s: u128, neg: bool) -> u128 {
        if neg {
            !s & self.mask
        } else {
            s
        }
    }

    fn pol_table(&self, t: u64, neg: bool) -> u64 {
        if neg {
            !t & self.table_mask
        } else {
            t
        }
    }

    fn source(&self, st: &State, s: usize) -> (u128, u64) {
        let l = self.leaves.len();
        if s < l {
            (self.leaves[s].sig, self.leaves[s].table)
        } else {
            let n = &st.nodes[s - l];
            (n.sig, n.table)
        }
    }

    /// Level-0 fits: constants, then each leaf direct and negated.
    pub fn level_zero(&self, max_extra: usize) -> Outcome {
        let mut out = Outcome::default();
        for b in [false, true] {
            out.examined += 1;
            let sig = if b { self.mask } else { 0 };
            if sig == self.target {
                let t = if b { self.table_mask } else { 0 };
                out.offer((self.build)(Raw::Const(b)), t, self.track_tables);
            }
        }
        for (j, leaf) in self.leaves.iter().enumerate() {
            if leaf.cost > max_extra {
                continue;
            }
            for neg in [false, true] {
                out.examined += 1;
                if self.pol_sig(leaf.sig, neg) == self.target {
                    let t = self.pol_table(leaf.table, neg);
                    out.offer(
                        (self.build)(Raw::Leaf(j, Polarity::from_negated(neg))),
                        t,
                        self.track_tables,
                    );
                }
            }
        }
        out
    }

    /// All fits with exactly `k ≥ 1` nodes whose leaf cost is at most
    /// `max_extra`.
    pub fn level(&self, k: usize, max_extra: usize, threads: usize) -> Outcome {
        assert!(k >= 1);
        let l = self.leaves.len();
        let root = State {
            nodes: Vec::with_capacity(k),
            uses: Vec::with_capacity(k),
            unused: 0,
            leaf_used: vec![false; l],
            extra: 0,
        };
        if k == 1 {
            let mut out = Outcome::default();
            let mut st = root;
            self.finals(&mut st, k, max_extra, &mut out);
            return out;
        }
        let mut firsts = Vec::new();
        let mut head = Outcome::default();
        self.expand(&root, k, max_extra, &mut head, |node| firsts.push(node));
        let run = |node: &Node| {
            let mut st = root.clone();
            let mut out = Outcome::default();
            self.push(&mut st, *node);
            self.dfs(&mut st, k, max_extra, &mut out);
            out
        };
        let parts: Vec<Outcome> = if threads > 1 && firsts.len() > 1 {
            pool(threads).install(|| firsts.par_iter().map(run).collect())
        } else {
            firsts.iter().map(run).collect()
        };
        parts.into_iter().fold(head, Outcome::merge)
    }

    fn push(&self, st: &mut State, node: Node) {
        let l = self.leaves.len();
        for s in [node.a, node.b] {
            if s < l {
                if !st.leaf_used[s] {
                    st.leaf_used[s] = true;
                    st.extra += self.leaves[s].cost;
                }
            } else {
                if st.uses[s - l] == 0 {
                    st.unused -= 1;
                }
                st.uses[s - l] += 1;
            }
        }
        st.nodes.push(node);
        st.uses.push(0);
        st.unused += 1;
    }

    fn pop(&self, st: &mut State) {
        let l = self.leaves.len();
        let node = st.nodes.pop().expect("nonempty");
        st.uses.pop();
        st.unused -= 1;
        for s in [node.b, node.a] {
            if s >= l {
                st.uses[s - l] -= 1;
                if st.uses[s - l] == 0 {
                    st.unused += 1;
                }
            }
        }
        // Leaf flags are rebuilt from scratch; cheap next to the search.
        st.leaf_used.iter_mut().for_each(|u| *u = false);
        st.extra = 0;
        for n in &st.nodes {
            for s in [n.a, n.b] {
                if s < l && !st.leaf_used[s] {
                    st.leaf_used[s] = true;
                    st.extra += self.leaves[s].cost;
                }
            }
        }
    }

    fn added_cost(&self, st: &State, a: usize, b: usize) -> usize {
        let l = self.leaves.len();
        [a, b]
            .iter()
            .filter(|&&s| s < l && !st.leaf_used[s])
            .map(|&s| self.leaves[s].cost)
            .sum()
    }

    /// Candidate non-ending nodes at position `st.nodes.len()`.
    fn expand(&self, st: &State, k: usize, max_extra: usize, out: &mut Outcome, mut f: impl FnMut(Node)) {
        let l = self.leaves.len();
        let i = st.nodes.len();
        let nsrc = l + i;
        let prev = i.checked_sub(1).map(|p| (l + p, st.nodes[p].sig));
        for b in 1..nsrc {
            for a in 0..b {
                let consumed = [a, b].iter().filter(|&&s| s >= l && st.uses[s - l] == 0).count();
                if st.unused + 1 - consumed > k - i {
                    out.pruned += 4;
                    continue;
                }
                if st.extra + self.added_cost(st, a, b) > max_extra {
                    out.pruned += 4;
                    continue;
                }
                let (sa, ta) = self.source(st, a);
                let (sb, tb) = self.source(st, b);
                for (na, nb) in POLS {
                    out.examined += 1;
                    let sig = self.pol_sig(sa, na) & self.pol_sig(sb, nb);
                    if let Some((p, psig)) = prev {
                        if a != p && b != p && sig <= psig {
                            out.pruned += 1;
                            continue;
                        }
                    }
                    let nm = self.norm(sig);
                    if nm == 0
                        || self.leaves.iter().any(|x| x.cost == 0 && self.norm(x.sig) == nm)
                        || st.nodes.iter().any(|x| self.norm(x.sig) == nm)
                    {
                        out.pruned += 1;
                        continue;
                    }
                    let table = self.pol_table(ta, na) & self.pol_table(tb, nb);
                    f(Node {
                        a,
                        b,
                        na,
                        nb,
                        gate: GateKind::And,
                        sig,
                        table,
                    });
                }
            }
        }
    }

    fn dfs(&self, st: &mut State, k: usize, max_extra: usize, out: &mut Outcome) {
        if st.nodes.len() == k - 1 {
            self.finals(st, k, max_extra, out);
            return;
        }
        let mut cands = Vec::new();
        self.expand(st, k, max_extra, out, |n| cands.push(n));
        for node in cands {
            self.push(st, node);
            self.dfs(st, k, max_extra, out);
            self.pop(st);
        }
    }

    fn finals(&self, st: &mut State, k: usize, max_extra: usize, out: &mut Outcome) {
        let l = self.leaves.len();
        let i = st.nodes.len();
        debug_assert_eq!(i, k - 1);
        let nsrc = l + i;
        let unused: Vec<usize> = (0..i).filter(|&x| st.uses[x] == 0).map(|x| x + l).collect();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        match unused.as_slice() {
            [] => {
                for b in 1..nsrc {
                    for a in 0..b {
                        pairs.push((a, b));
                    }
                }
            }
            [u] => {
                for s in 0..nsrc {
                    if s != *u {
                        pairs.push((s.min(*u), s.max(*u)));
                    }
                }
            }
            [u, v] => pairs.push((*u, *v)),
            _ => {
                out.pruned += 1;
                return;
            }
        }
        for (a, b) in pairs {
            if st.extra + self.added_cost(st, a, b) > max_extra {
                out.pruned += 8;
                continue;
            }
            let (sa, ta) = self.source(st, a);
            let (sb, tb) = self.source(st, b);
            for gate in [GateKind::Or, GateKind::And] {
                for (na, nb) in POLS {
                    out.examined += 1;
                    let x = self.pol_sig(sa, na);
                    let y = self.pol_sig(sb, nb);
                    let sig = match gate {
                        GateKind::And => x & y,
                        GateKind::Or => x | y,
                    };
                    if sig != self.target {
                        continue;
                    }
                    let table = gate.apply_words(self.pol_table(ta, na), self.pol_table(tb, nb));
                    let sig = sig & self.mask;
                    let node = Node {
                        a,
                        b,
                        na,
                        nb,
                        gate,
                        sig,
                        table,
                    };
                    st.nodes.push(node);
                    let c = (self.build)(Raw::Nodes(&st.nodes));
                    st.nodes.pop();
                    out.offer(c, table & self.table_mask, self.track_tables);
                }
            }
        }
    }
}

//! Exact Fitting Extremum: the minimum node count of a circuit agreeing with
//! a valued sample set, with a reproducible witness.

mod engine;

use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::bits::BitVector;
use crate::circuit::{Body, Circuit, Edge, NodeRef, WorkingNode};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::function::{dnf_fitting_circuit, SampleSet};
use crate::table::TruthTable;

use engine::{Builder, Leaf, Outcome, Raw, Search};

/// Samples per search; one bit of a 128-bit signature each.
pub const MAX_SAMPLES: usize = 128;
/// Largest N with packed full-domain tables.
const PACKED_LIMIT: usize = 6;

#[derive(Clone, Debug)]
pub struct FitProblem {
    pub samples: SampleSet,
    pub d_cap: Option<usize>,
    pub enumerate_all: bool,
}

impl FitProblem {
    pub fn new(samples: SampleSet) -> Self {
        FitProblem {
            samples,
            d_cap: None,
            enumerate_all: false,
        }
    }

    pub fn enumerate_all(mut self) -> Self {
        self.enumerate_all = true;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.d_cap = Some(cap);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    pub examined: u64,
    pub pruned: u64,
    pub fitting: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub d_min: usize,
    /// Canonical minimal witness.
    pub witness: Circuit,
    /// One representative per function class when enumerating, otherwise
    /// just the witness.
    pub witnesses: Vec<Circuit>,
    /// Full-domain behaviors of all minimal fitting circuits; filled only
    /// when enumerating.
    pub function_classes: BTreeSet<TruthTable>,
    pub stats: SearchStats,
}

/// Search ceiling from the explicit DNF construction.
pub fn upper_bound(sv: &SampleSet) -> Circuit {
    dnf_fitting_circuit(sv)
}

pub fn solve_min(p: &FitProblem) -> Result<SynthesisResult> {
    solve_min_with(p, &Config::from_env())
}

/// Full-domain behaviors of every minimal fitting circuit.
pub fn enumerate_min_functions(p: &FitProblem) -> Result<BTreeSet<TruthTable>> {
    enumerate_min_functions_with(p, &Config::from_env())
}

pub fn enumerate_min_functions_with(p: &FitProblem, cfg: &Config) -> Result<BTreeSet<TruthTable>> {
    let mut p = p.clone();
    p.enumerate_all = true;
    Ok(solve_min_with(&p, cfg)?.function_classes)
}

struct Prepared {
    n: usize,
    points: Vec<BitVector>,
    mask: u128,
    table_mask: u64,
    target: u128,
}

fn prepare(sv: &SampleSet) -> Result<Prepared> {
    sv.require_valued()?;
    let m = sv.len();
    if m > MAX_SAMPLES {
        return Err(Error::TooManySamples {
            count: m,
            limit: MAX_SAMPLES,
        });
    }
    let n = sv.n_inputs();
    let mut target = 0u128;
    let mut points = Vec::with_capacity(m);
    for (s, (v, b)) in sv.labeled().enumerate() {
        if b {
            target |= 1 << s;
        }
        points.push(v);
    }
    let mask = if m == 128 { u128::MAX } else { (1u128 << m) - 1 };
    let table_mask = if n >= PACKED_LIMIT {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    };
    Ok(Prepared {
        n,
        points,
        mask,
        table_mask,
        target,
    })
}

impl Prepared {
    fn signature(&self, c: &Circuit) -> Result<u128> {
        let mut s = 0u128;
        for (i, v) in self.points.iter().enumerate() {
            if c.evaluate(v)? {
                s |= 1 << i;
            }
        }
        Ok(s)
    }

    fn input_leaf(&self, j: usize) -> Leaf {
        let sig = self
            .points
            .iter()
            .enumerate()
            .filter(|(_, v)| v.get(j))
            .fold(0u128, |acc, (i, _)| acc | (1 << i));
        let table = if self.n <= PACKED_LIMIT {
            TruthTable::variable(self.n, j).as_u64().expect("packed")
        } else {
            0
        };
        Leaf { sig, table, cost: 0 }
    }
}

fn edge_to(leaf_count: usize, n: usize, s: usize, neg: bool, member_out: &[Edge]) -> Edge {
    let e = if s < n {
        Edge::input(s)
    } else if s < leaf_count {
        member_out[s - n]
    } else {
        Edge::working(s - leaf_count)
    };
    if neg {
        e.negate()
    } else {
        e
    }
}

/// Builds circuits from raw search output; `members` are opaque leaves placed
/// after the inputs and are inlined on use.
fn builder<'a>(n: usize, members: &'a [Circuit]) -> impl Fn(Raw<'_>) -> Circuit + Sync + 'a {
    move |raw| match raw {
        Raw::Const(b) => Circuit::constant(n, b),
        Raw::Leaf(j, pol) if j < n => Circuit::literal(n, j, pol),
        Raw::Leaf(j, pol) => {
            let m = &members[j - n];
            if pol.is_negated() {
                m.complement()
            } else {
                m.clone()
            }
        }
        Raw::Nodes(raw_nodes) => {
            let leaf_count = n + members.len();
            let mut used: Vec<usize> = raw_nodes
                .iter()
                .flat_map(|x| [x.a, x.b])
                .filter(|&s| s >= n && s < leaf_count)
                .collect();
            used.sort_unstable();
            used.dedup();
            let mut nodes: Vec<WorkingNode> = Vec::new();
            let mut member_out = vec![Edge::input(0); members.len()];
            for s in used {
                let offset = nodes.len();
                let shift = |e: Edge| match e.source {
                    NodeRef::Working(k) => Edge::new(NodeRef::Working(k + offset), e.polarity),
                    NodeRef::Input(_) => e,
                };
                for w in members[s - n].nodes() {
                    nodes.push(WorkingNode::new(w.gate, shift(w.left), shift(w.right)));
                }
                member_out[s - n] = Edge::working(nodes.len() - 1);
            }
            let base = nodes.len();
            for x in raw_nodes {
                let remap = |s: usize, neg: bool| {
                    let e = edge_to(leaf_count, n, s, neg, &member_out);
                    match e.source {
                        NodeRef::Working(k) if s >= leaf_count => Edge::new(NodeRef::Working(k + base), e.polarity),
                        _ => e,
                    }
                };
                nodes.push(WorkingNode::new(x.gate, remap(x.a, x.na), remap(x.b, x.nb)));
            }
            Circuit::new_unchecked(n, Body::Nodes(nodes))
        }
    }
}

fn finish(o: Outcome, d: usize, track: bool, n: usize, start: Instant, mut stats: SearchStats) -> SynthesisResult {
    stats.examined += o.examined;
    stats.pruned += o.pruned;
    stats.fitting += o.fits;
    stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (_, witness) = o.best.expect("level has a fit");
    let (function_classes, witnesses) = if track {
        let classes = o.classes.keys().map(|&t| TruthTable::from_u64(n, t)).collect();
        let reps = o.classes.into_values().map(|(_, c)| c).collect();
        (classes, reps)
    } else {
        (BTreeSet::new(), vec![witness.clone()])
    };
    SynthesisResult {
        d_min: d,
        witness,
        witnesses,
        function_classes,
        stats,
    }
}

pub fn solve_min_with(p: &FitProblem, cfg: &Config) -> Result<SynthesisResult> {
    let start = Instant::now();
    let prep = prepare(&p.samples)?;
    let n = prep.n;
    if p.enumerate_all && n > cfg.enum_limit.min(PACKED_LIMIT) {
        return Err(Error::TooManyInputs {
            n,
            limit: cfg.enum_limit.min(PACKED_LIMIT),
        });
    }
    let ceiling = upper_bound(&p.samples).node_count();
    let cap = p.d_cap.unwrap_or(cfg.d_cap).min(ceiling);
    let leaves: Vec<Leaf> = (0..n).map(|j| prep.input_leaf(j)).collect();
    let build = builder(n, &[]);
    let search = Search {
        leaves: &leaves,
        mask: prep.mask,
        table_mask: prep.table_mask,
        target: prep.target,
        track_tables: p.enumerate_all,
        build: &build as &Builder,
    };
    let mut stats = SearchStats::default();
    for d in 0..=cap {
        let o = if d == 0 {
            search.level_zero(0)
        } else {
            search.level(d, 0, cfg.threads)
        };
        if o.found() {
            return Ok(finish(o, d, p.enumerate_all, n, start, stats));
        }
        stats.examined += o.examined;
        stats.pruned += o.pruned;
    }
    Err(Error::CapExceeded { cap })
}

/// Result of a pool-restricted search.
#[derive(Clone, Debug)]
pub struct PooledFit {
    /// Node count of the inlined circuit.
    pub d: usize,
    /// Nodes placed on top of the pool members and inputs.
    pub new_nodes: usize,
    pub circuit: Circuit,
    pub stats: SearchStats,
}

/// Smallest fit built from inputs and pool members, where a member costs its
/// own node count. Totals are tried in increasing order, and within a total
/// the fewest new nodes first. `Ok(None)` when nothing fits within `cap`.
pub fn solve_pooled(sv: &SampleSet, pool: &[Circuit], cap: usize, cfg: &Config) -> Result<Option<PooledFit>> {
    let start = Instant::now();
    let prep = prepare(sv)?;
    let n = prep.n;
    let members: Vec<Circuit> = pool
        .iter()
        .filter(|c| !c.is_degenerate() && c.n_inputs() == n)
        .cloned()
        .collect();
    let mut leaves: Vec<Leaf> = (0..n).map(|j| prep.input_leaf(j)).collect();
    for m in &members {
        leaves.push(Leaf {
            sig: prep.signature(m)?,
            table: 0,
            cost: m.node_count(),
        });
    }
    let build = builder(n, &members);
    let search = Search {
        leaves: &leaves,
        mask: prep.mask,
        table_mask: prep.table_mask,
        target: prep.target,
        track_tables: false,
        build: &build as &Builder,
    };
    let mut stats = SearchStats::default();
    for total in 0..=cap {
        for k in 0..=total {
            let extra = total - k;
            let o = if k == 0 {
                search.level_zero(extra)
            } else {
                search.level(k, extra, cfg.threads)
            };
            stats.examined += o.examined;
            stats.pruned += o.pruned;
            stats.fitting += o.fits;
            if let Some((_, circuit)) = o.best {
                stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                return Ok(Some(PooledFit {
                    d: circuit.node_count(),
                    new_nodes: k,
                    circuit,
                    stats,
                }));
            }
        }
    }
    Ok(None)
}

/// True iff `c` is a valid circuit that agrees with every labeled sample.
pub fn fits(sv: &SampleSet, c: &Circuit) -> bool {
    c.is_valid() && sv.fits(c).unwrap_or(false)
}

#[cfg(test)]
mod tests;

//! Proper sampling sets: verification, minimum-size search, extraction from a
//! minimal circuit, and the expansion property.

mod witness;

pub use witness::{check_node_witnesses, witness_table, WitnessTriple};

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bits::BitVector;
use crate::circuit::{Body, Circuit, GateKind, NodeRef};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::function::{Sample, SampleSet};
use crate::synth::{solve_min_with, FitProblem};
use crate::table::TruthTable;

use witness::ValueTables;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PssReport {
    pub is_pss: bool,
    pub d_min: usize,
    /// First minimal fitting function, in table order, that differs from f.
    pub offending_function: Option<TruthTable>,
    pub function_classes: Vec<TruthTable>,
    pub size: usize,
}

fn check_points(f: &TruthTable, s: &BTreeSet<BitVector>) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySamples);
    }
    if let Some(v) = s.iter().find(|v| v.len() != f.n_inputs()) {
        return Err(Error::DimensionMismatch {
            expected: f.n_inputs(),
            found: v.len(),
        });
    }
    Ok(())
}

pub fn is_pss(f: &TruthTable, s: &BTreeSet<BitVector>) -> Result<PssReport> {
    is_pss_with(f, s, &Config::from_env())
}

/// S is a PSS of f iff every minimal circuit fitting f on S computes f.
pub fn is_pss_with(f: &TruthTable, s: &BTreeSet<BitVector>, cfg: &Config) -> Result<PssReport> {
    check_points(f, s)?;
    let sv = SampleSet::from_function(f, s)?;
    let r = solve_min_with(&FitProblem::new(sv).enumerate_all(), cfg)?;
    let classes: Vec<TruthTable> = r.function_classes.into_iter().collect();
    let offending = classes.iter().find(|g| *g != f).cloned();
    Ok(PssReport {
        is_pss: classes.len() == 1 && &classes[0] == f,
        d_min: r.d_min,
        offending_function: offending,
        function_classes: classes,
        size: s.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MpssMode {
    /// Subsets by size, then row order; the first PSS is a certified minimum.
    Exhaustive,
    /// Random deletion orders from the whole domain; keeps the smallest PSS.
    Randomized { rounds: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MpssResult {
    #[serde(serialize_with = "ser_points")]
    pub set: BTreeSet<BitVector>,
    pub size: usize,
    /// True when the size is proven minimum.
    pub certified: bool,
    pub checked: u64,
}

pub(crate) fn ser_points<S: serde::Serializer>(
    s: &BTreeSet<BitVector>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_seq(s.iter().map(|v| v.to_string()))
}

pub fn find_mpss(f: &TruthTable) -> Result<MpssResult> {
    let cfg = Config::from_env();
    let mode = if f.n_inputs() <= cfg.subset_limit {
        MpssMode::Exhaustive
    } else {
        MpssMode::Randomized { rounds: 4 }
    };
    find_mpss_with(f, mode, &cfg)
}

/// Advances `idx` to the next k-combination of 0..m in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn find_mpss_with(f: &TruthTable, mode: MpssMode, cfg: &Config) -> Result<MpssResult> {
    let n = f.n_inputs();
    let all: Vec<BitVector> = BitVector::all(n).collect();
    let mut checked = 0u64;
    match mode {
        MpssMode::Exhaustive => {
            if n > cfg.subset_limit {
                return Err(Error::TooManyInputs {
                    n,
                    limit: cfg.subset_limit,
                });
            }
            for k in 1..=all.len() {
                let mut idx: Vec<usize> = (0..k).collect();
                loop {
                    let s: BTreeSet<BitVector> = idx.iter().map(|&i| all[i]).collect();
                    checked += 1;
                    if is_pss_with(f, &s, cfg)?.is_pss {
                        return Ok(MpssResult {
                            size: s.len(),
                            set: s,
                            certified: true,
                            checked,
                        });
                    }
                    if !next_combination(&mut idx, all.len()) {
                        break;
                    }
                }
            }
            unreachable!("the whole domain is always proper")
        }
        MpssMode::Randomized { rounds } => {
            let mut best: Option<BTreeSet<BitVector>> = None;
            for round in 0..rounds.max(1) {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(round as u64));
                let mut order = all.clone();
                order.shuffle(&mut rng);
                let mut s: BTreeSet<BitVector> = all.iter().copied().collect();
                for v in order {
                    if s.len() == 1 {
                        break;
                    }
                    s.remove(&v);
                    checked += 1;
                    if !is_pss_with(f, &s, cfg)?.is_pss {
                        s.insert(v);
                    }
                }
                let better = match &best {
                    None => true,
                    Some(b) => (s.len(), &s) < (b.len(), b),
                };
                if better {
                    best = Some(s);
                }
            }
            let set = best.expect("at least one round");
            Ok(MpssResult {
                size: set.len(),
                set,
                certified: false,
                checked,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractReport {
    /// Final proper sampling set: `joined`, grown by `repair` when the
    /// post-check rejects it.
    #[serde(serialize_with = "ser_points")]
    pub set: BTreeSet<BitVector>,
    pub size: usize,
    pub d: usize,
    /// 3·d(C).
    pub bound: usize,
    /// Set produced by the branch-joining procedure alone.
    #[serde(serialize_with = "ser_points")]
    pub joined: BTreeSet<BitVector>,
    /// Post-check verdict on `joined`.
    pub verified: bool,
    /// Points added by the repair step.
    pub repairs: usize,
    /// Times a branch domain came up empty and was widened.
    pub relaxations: usize,
}

struct Extractor<'a> {
    c: &'a Circuit,
    vals: ValueTables,
    chosen: BTreeSet<BitVector>,
    relaxations: usize,
}

impl Extractor<'_> {
    fn n(&self) -> usize {
        self.c.n_inputs()
    }

    /// A two-point set differing only in b_{j+1}, inside `domain` when
    /// possible; points chosen earlier are preferred.
    fn leaf_pair(&mut self, j: usize, domain: &TruthTable) -> BTreeSet<BitVector> {
        let pick = |dom: &TruthTable, chosen: &BTreeSet<BitVector>| {
            BitVector::all(dom.n_inputs())
                .filter(|x| !x.get(j))
                .map(|x| (x, x.with(j, true)))
                .filter(|(x, y)| dom.at(x) && dom.at(y))
                .max_by_key(|(x, y)| (chosen.contains(x) as u8 + chosen.contains(y) as u8, std::cmp::Reverse(x.index())))
        };
        let pair = match pick(domain, &self.chosen) {
            Some(p) => p,
            None => {
                self.relaxations += 1;
                pick(&TruthTable::constant(self.n(), true), &self.chosen).expect("full domain")
            }
        };
        self.chosen.insert(pair.0);
        self.chosen.insert(pair.1);
        BTreeSet::from([pair.0, pair.1])
    }

    /// Rows of `domain` where `r` (after `negated`) equals `value`; falls
    /// back to the whole space when that is empty.
    fn restrict(&mut self, domain: &TruthTable, r: NodeRef, negated: bool, value: bool) -> TruthTable {
        let raw = self.vals.get(r);
        let t = if negated ^ value { raw.clone() } else { raw.not() };
        let narrowed = t.combine(domain, GateKind::And);
        if narrowed.count_ones() > 0 {
            return narrowed;
        }
        self.relaxations += 1;
        if t.count_ones() > 0 {
            t
        } else {
            TruthTable::constant(self.n(), true)
        }
    }

    fn extract(&mut self, r: NodeRef, domain: &TruthTable) -> BTreeSet<BitVector> {
        match r {
            NodeRef::Input(j) => self.leaf_pair(j, domain),
            NodeRef::Working(k) => {
                let node = self.c.nodes()[k];
                // value after polarity at which the gate passes the other side
                let pass = node.gate == GateKind::And;
                let dl = self.restrict(domain, node.right.source, node.right.polarity.is_negated(), pass);
                let mut s = self.extract(node.left.source, &dl);
                let dr = self.restrict(domain, node.left.source, node.left.polarity.is_negated(), pass);
                s.extend(self.extract(node.right.source, &dr));
                s
            }
        }
    }
}

pub fn extract_pss(f: &TruthTable, c: &Circuit) -> Result<ExtractReport> {
    extract_pss_with(f, c, &Config::from_env())
}

/// Picks a sampling set from a circuit that expresses `f` with the minimum
/// node count, joining branch sets bottom-up.
pub fn extract_pss_with(f: &TruthTable, c: &Circuit, cfg: &Config) -> Result<ExtractReport> {
    if c.n_inputs() != f.n_inputs() {
        return Err(Error::DimensionMismatch {
            expected: f.n_inputs(),
            found: c.n_inputs(),
        });
    }
    if &c.truth_table()? != f {
        return Err(Error::NotExpressing);
    }
    let d_min = solve_min_with(&FitProblem::new(SampleSet::full(f)), cfg)?.d_min;
    if c.node_count() > d_min {
        return Err(Error::NotMinimal {
            d: c.node_count(),
            d_min,
        });
    }
    let n = f.n_inputs();
    let mut ex = Extractor {
        c,
        vals: ValueTables::new(c)?,
        chosen: BTreeSet::new(),
        relaxations: 0,
    };
    let full = TruthTable::constant(n, true);
    let set = match c.body() {
        Body::Const(_) => BTreeSet::new(),
        Body::Literal { input, .. } => ex.extract(NodeRef::Input(*input), &full),
        Body::Nodes(nodes) => ex.extract(NodeRef::Working(nodes.len() - 1), &full),
    };
    let verified = !set.is_empty() && is_pss_with(f, &set, cfg)?.is_pss;
    let fixed = if verified { set.clone() } else { repair(f, &set, cfg)? };
    Ok(ExtractReport {
        size: fixed.len(),
        d: c.node_count(),
        bound: 3 * c.node_count(),
        repairs: fixed.len() - set.len(),
        verified,
        relaxations: ex.relaxations,
        joined: set,
        set: fixed,
    })
}

/// Grows `s` into a PSS by adding, for each offending minimal function, the
/// first row where it differs from f.
pub fn repair(f: &TruthTable, s: &BTreeSet<BitVector>, cfg: &Config) -> Result<BTreeSet<BitVector>> {
    let mut s = s.clone();
    if s.is_empty() {
        s.insert(BitVector::zeros(f.n_inputs()));
    }
    loop {
        let r = is_pss_with(f, &s, cfg)?;
        match r.offending_function {
            None => return Ok(s),
            Some(g) => {
                let x = g.differences(f).next().expect("offending function differs");
                s.insert(x);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub d_before: usize,
    pub d_after: usize,
    /// Label given to the new point: the opposite of the canonical witness.
    pub label: bool,
    /// Whether every minimal fitting function takes the same value at the
    /// new point, so the label contradicts all of them.
    pub contradicts_all: bool,
    pub strict: bool,
}

pub fn expansion_check(sv: &SampleSet, b: &BitVector) -> Result<ExpansionReport> {
    expansion_check_with(sv, b, &Config::from_env())
}

pub fn expansion_check_with(sv: &SampleSet, b: &BitVector, cfg: &Config) -> Result<ExpansionReport> {
    if sv.contains(b) {
        return Err(Error::ConflictingSample { input: b.to_string() });
    }
    let track = sv.n_inputs() <= cfg.enum_limit;
    let mut p = FitProblem::new(sv.clone());
    p.enumerate_all = track;
    let before = solve_min_with(&p, cfg)?;
    let label = !before.witness.evaluate(b)?;
    let contradicts_all = track && before.function_classes.iter().all(|g| g.at(b) != label);
    let grown = sv.with(Sample::labeled(*b, label))?;
    let after = solve_min_with(&FitProblem::new(grown), cfg)?;
    Ok(ExpansionReport {
        d_before: before.d_min,
        d_after: after.d_min,
        label,
        contradicts_all,
        strict: after.d_min > before.d_min,
    })
}

#[derive(Clone, Debug)]
pub struct CircuitBound {
    pub circuit: Circuit,
    pub d: usize,
    /// N·|S|.
    pub bound: usize,
}

pub fn pss_to_circuit_bound(f: &TruthTable, s: &BTreeSet<BitVector>) -> Result<CircuitBound> {
    pss_to_circuit_bound_with(f, s, &Config::from_env())
}

/// Runs the solver on f labeled over S; the witness must express f.
pub fn pss_to_circuit_bound_with(f: &TruthTable, s: &BTreeSet<BitVector>, cfg: &Config) -> Result<CircuitBound> {
    check_points(f, s)?;
    let sv = SampleSet::from_function(f, s)?;
    let r = solve_min_with(&FitProblem::new(sv), cfg)?;
    if &r.witness.truth_table()? != f {
        return Err(Error::NotExpressing);
    }
    Ok(CircuitBound {
        d: r.d_min,
        circuit: r.witness,
        bound: f.n_inputs() * s.len(),
    })
}

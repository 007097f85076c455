//! FE-driven learning dynamics over X-forms.

mod xform;

use std::num::NonZeroUsize;

use lru::LruCache;
use serde::Serialize;

use crate::bits::BitVector;
use crate::circuit::Circuit;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::function::{Sample, SampleSet};
use crate::synth::{solve_min_with, solve_pooled, FitProblem};
use crate::table::TruthTable;

pub use xform::{circuit_to_xform, xform_to_circuit, Expr, Pattern, XForm};

pub const DEFAULT_POOL_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Refit by unrestricted FE on every miss.
    Of,
    /// Refit by FE over pool members and inputs.
    Sf,
}

pub type StreamItem = Sample;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EventKind {
    #[serde(rename = "hit")]
    Hit,
    #[serde(rename = "miss+refit")]
    Refit,
    #[serde(rename = "observe")]
    Observe,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    /// 1-based stream position.
    pub step: usize,
    pub event: EventKind,
    /// d of the current circuit after the step.
    pub d: usize,
    /// Current table equals the reference target; null without one.
    pub converged: Option<bool>,
    /// The pooled refit found nothing within the cap and unrestricted FE
    /// was used instead.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub fallback: bool,
}

/// Pool of X-forms available to Strategy SF, one per function, evicting the
/// least recently used.
#[derive(Clone, Debug)]
pub struct Pool {
    entries: LruCache<TruthTable, (XForm, Circuit)>,
}

impl Pool {
    pub fn new(cap: usize) -> Self {
        Pool {
            entries: LruCache::new(NonZeroUsize::new(cap.max(1)).expect("positive")),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds or refreshes `x`, keeping the smaller circuit per function.
    pub fn add(&mut self, x: XForm) -> Result<()> {
        let c = xform_to_circuit(&x);
        let t = c.truth_table()?;
        match self.entries.get_mut(&t) {
            Some(e) if e.1.node_count() <= c.node_count() => {}
            Some(e) => *e = (x, c),
            None => {
                self.entries.put(t, (x, c));
            }
        }
        Ok(())
    }

    pub fn contains(&self, t: &TruthTable) -> bool {
        self.entries.contains(t)
    }

    /// Members from most to least recently used.
    pub fn forms(&self) -> impl Iterator<Item = &XForm> {
        self.entries.iter().map(|(_, (x, _))| x)
    }

    fn circuits(&self) -> Vec<Circuit> {
        self.entries.iter().map(|(_, (_, c))| c.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct LearningState {
    pub strategy: Strategy,
    pub current: XForm,
    /// Compiled form of `current`.
    pub circuit: Circuit,
    /// Labeled samples received so far.
    pub seen: SampleSet,
    pub pool: Pool,
    pub trace: Vec<TraceEvent>,
    target: Option<TruthTable>,
    cfg: Config,
}

impl LearningState {
    pub fn new(strategy: Strategy, initial: XForm, cfg: &Config) -> Self {
        let n = initial.n_inputs();
        LearningState {
            strategy,
            circuit: xform_to_circuit(&initial),
            current: initial,
            seen: SampleSet::new(n),
            pool: Pool::new(DEFAULT_POOL_CAP),
            trace: Vec::new(),
            target: None,
            cfg: cfg.clone(),
        }
    }

    pub fn with_target(mut self, target: TruthTable) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_pool_cap(mut self, cap: usize) -> Self {
        self.pool = Pool::new(cap);
        self
    }

    pub fn n_inputs(&self) -> usize {
        self.current.n_inputs()
    }

    pub fn converged(&self) -> Option<bool> {
        let t = self.target.as_ref()?;
        Some(self.circuit.truth_table().map(|c| &c == t).unwrap_or(false))
    }

    fn replace(&mut self, c: &Circuit) {
        self.current = circuit_to_xform(c);
        self.circuit = xform_to_circuit(&self.current);
    }

    fn record(&mut self, event: EventKind, fallback: bool) {
        let e = TraceEvent {
            step: self.trace.len() + 1,
            event,
            d: self.circuit.node_count(),
            converged: self.converged(),
            fallback,
        };
        self.trace.push(e);
    }

    fn step_index(&self) -> usize {
        self.trace.len() + 1
    }

    /// Adds the labeled item to `seen`; false when the current circuit
    /// already agrees with it.
    fn absorb(&mut self, input: BitVector, o: bool) -> Result<bool> {
        let step = self.step_index();
        if input.len() != self.n_inputs() {
            return Err(Error::Stream {
                step,
                message: format!("input {input} has {} bits, expected {}", input.len(), self.n_inputs()),
            });
        }
        self.seen.insert(Sample::labeled(input, o)).map_err(|e| Error::Stream {
            step,
            message: e.to_string(),
        })?;
        Ok(self.circuit.evaluate(&input)? != o)
    }

    fn refit_unrestricted(&mut self) -> Result<()> {
        let p = FitProblem::new(self.seen.clone());
        let r = solve_min_with(&p, &self.cfg)?;
        self.replace(&r.witness);
        Ok(())
    }

    /// One Strategy OF step.
    pub fn step_of(&mut self, item: &StreamItem) -> Result<()> {
        let Some(o) = item.output else {
            return Err(Error::Stream {
                step: self.step_index(),
                message: "objective learning needs a labeled item".into(),
            });
        };
        if self.absorb(item.input, o)? {
            self.refit_unrestricted()?;
            self.record(EventKind::Refit, false);
        } else {
            self.record(EventKind::Hit, false);
        }
        Ok(())
    }

    /// One Strategy SF step. Every observed input adds its minterm form to
    /// the pool, and every refit adds the sub-forms of the new current form.
    pub fn step_sf(&mut self, item: &StreamItem) -> Result<()> {
        if item.input.len() != self.n_inputs() {
            return Err(Error::Stream {
                step: self.step_index(),
                message: format!("input {} has {} bits, expected {}", item.input, item.input.len(), self.n_inputs()),
            });
        }
        self.pool.add(XForm::minterm(&item.input))?;
        let Some(o) = item.output else {
            self.record(EventKind::Observe, false);
            return Ok(());
        };
        if !self.absorb(item.input, o)? {
            self.record(EventKind::Hit, false);
            return Ok(());
        }
        let cap = self.cfg.d_cap;
        let fallback = match solve_pooled(&self.seen, &self.pool.circuits(), cap, &self.cfg)? {
            Some(fit) => {
                self.replace(&fit.circuit);
                false
            }
            None => {
                self.refit_unrestricted()?;
                true
            }
        };
        for sub in sub_circuits(&self.circuit) {
            self.pool.add(circuit_to_xform(&sub))?;
        }
        self.record(EventKind::Refit, fallback);
        Ok(())
    }

    pub fn step(&mut self, item: &StreamItem) -> Result<()> {
        match self.strategy {
            Strategy::Of => self.step_of(item),
            Strategy::Sf => self.step_sf(item),
        }
    }
}

/// The circuit rooted at each working node.
fn sub_circuits(c: &Circuit) -> Vec<Circuit> {
    let nodes = c.nodes();
    (0..nodes.len())
        .map(|k| Circuit::prune_dead(c.n_inputs(), nodes[..=k].to_vec()))
        .collect()
}

#[derive(Clone, Debug)]
pub struct LearningRun {
    pub state: LearningState,
    /// None without a reference target.
    pub converged: Option<bool>,
}

impl LearningRun {
    pub fn trace(&self) -> &[TraceEvent] {
        &self.state.trace
    }
}

/// Folds the stream through the chosen strategy.
pub fn run_learning(
    strategy: Strategy,
    initial: XForm,
    stream: &[StreamItem],
    target: Option<&TruthTable>,
    cfg: &Config,
) -> Result<LearningRun> {
    if let Some(t) = target {
        if t.n_inputs() != initial.n_inputs() {
            return Err(Error::DimensionMismatch {
                expected: initial.n_inputs(),
                found: t.n_inputs(),
            });
        }
    }
    let mut state = LearningState::new(strategy, initial, cfg);
    if let Some(t) = target {
        state = state.with_target(t.clone());
    }
    for item in stream {
        state.step(item)?;
    }
    Ok(LearningRun {
        converged: state.converged(),
        state,
    })
}

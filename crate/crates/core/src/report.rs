//! JSON report shapes shared by the command-line front end and the tests.

use serde::Serialize;
use serde_json::Value;

use crate::bits::BitVector;
use crate::circuit::Circuit;
use crate::error::Result;
use crate::format::write_circuit;
use crate::learn::TraceEvent;
use crate::pss::{CircuitBound, ExtractReport, MpssResult, PssReport};
use crate::synth::{SearchStats, SynthesisResult};

#[derive(Clone, Debug, Serialize)]
pub struct CircuitText {
    /// Circuit file text.
    pub text: String,
    pub infix: String,
    pub d: usize,
}

impl CircuitText {
    pub fn new(c: &Circuit) -> Result<Self> {
        Ok(CircuitText {
            text: write_circuit(c)?,
            infix: c.to_string(),
            d: c.node_count(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthReport {
    pub d_min: usize,
    pub witness: CircuitText,
    pub witnesses: Vec<CircuitText>,
    pub function_classes: Vec<String>,
    pub stats: SearchStats,
}

impl SynthReport {
    pub fn new(r: &SynthesisResult) -> Result<Self> {
        Ok(SynthReport {
            d_min: r.d_min,
            witness: CircuitText::new(&r.witness)?,
            witnesses: r.witnesses.iter().map(CircuitText::new).collect::<Result<_>>()?,
            function_classes: r.function_classes.iter().map(|t| t.to_string()).collect(),
            stats: r.stats.clone(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvalReport {
    pub input: String,
    pub output: bool,
    /// Values after each level matrix; absent for circuits without nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<bool>>>,
}

impl EvalReport {
    pub fn new(c: &Circuit, v: &BitVector) -> Result<Self> {
        let levels = match c.decompose_levels() {
            Ok(d) => Some(d.trace(v)?),
            Err(_) => None,
        };
        Ok(EvalReport {
            input: v.to_string(),
            output: c.evaluate(v)?,
            levels,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckPssReport {
    pub function: String,
    #[serde(flatten)]
    pub report: PssReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractPssReport {
    pub function: String,
    pub circuit: CircuitText,
    #[serde(flatten)]
    pub report: ExtractReport,
    /// A fresh FE run on f over the final set.
    pub rebuilt: Option<BoundReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub d: usize,
    /// N·|S|.
    pub bound: usize,
    pub circuit: CircuitText,
}

impl BoundReport {
    pub fn new(b: &CircuitBound) -> Result<Self> {
        Ok(BoundReport {
            d: b.d,
            bound: b.bound,
            circuit: CircuitText::new(&b.circuit)?,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MpssReport {
    pub function: String,
    pub mode: String,
    #[serde(flatten)]
    pub result: MpssResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnReport {
    pub strategy: String,
    pub steps: usize,
    pub converged: Option<bool>,
    pub current: String,
    pub circuit: CircuitText,
    pub trace: Vec<TraceEvent>,
}

/// Compact JSON with timing and search counters removed, for byte
/// comparisons between runs.
pub fn stable_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    strip(&mut v);
    v.to_string()
}

fn strip(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("stats");
            m.remove("elapsed_ms");
            m.remove("checked");
            for x in m.values_mut() {
                strip(x);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(strip),
        _ => {}
    }
}

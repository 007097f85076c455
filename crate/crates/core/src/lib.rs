pub mod bits;
pub mod circuit;
pub mod config;
pub mod error;
pub mod format;
pub mod function;
pub mod gen;
pub mod learn;
pub mod pss;
pub mod replay;
pub mod report;
pub mod synth;
pub mod table;

pub use bits::BitVector;
pub use circuit::{Circuit, Edge, GateKind, NodeRef, Polarity, WorkingNode};
pub use config::Config;
pub use error::{Error, Result};
pub use function::{Sample, SampleSet};
pub use table::TruthTable;

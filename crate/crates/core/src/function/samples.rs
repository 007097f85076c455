use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::BitVector;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::table::TruthTable;

/// One data item: an input and an optional output bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sample {
    pub input: BitVector,
    pub output: Option<bool>,
}

impl Sample {
    pub fn new(input: BitVector, output: Option<bool>) -> Self {
        Sample { input, output }
    }

    pub fn labeled(input: BitVector, output: bool) -> Self {
        Sample::new(input, Some(output))
    }
}

/// Samples keyed by input, kept in truth-table row order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SampleSet {
    n: usize,
    samples: BTreeMap<BitVector, Option<bool>>,
}

impl SampleSet {
    pub fn new(n: usize) -> Self {
        SampleSet {
            n,
            samples: BTreeMap::new(),
        }
    }

    /// Labels each point of `points` with `f`.
    pub fn from_function<'a>(f: &TruthTable, points: impl IntoIterator<Item = &'a BitVector>) -> Result<Self> {
        let mut s = SampleSet::new(f.n_inputs());
        for v in points {
            s.check_dim(v)?;
            s.insert(Sample::labeled(*v, f.at(v)))?;
        }
        Ok(s)
    }

    /// Every row of `f`.
    pub fn full(f: &TruthTable) -> Self {
        let points: Vec<BitVector> = BitVector::all(f.n_inputs()).collect();
        SampleSet::from_function(f, &points).expect("dimensions agree")
    }

    pub fn from_samples(n: usize, samples: impl IntoIterator<Item = Sample>) -> Result<Self> {
        let mut s = SampleSet::new(n);
        for x in samples {
            s.insert(x)?;
        }
        Ok(s)
    }

    fn check_dim(&self, v: &BitVector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Adds a sample. A repeated input is accepted when it carries the same
    /// output or no output; a labeled input may upgrade an unlabeled one.
    pub fn insert(&mut self, s: Sample) -> Result<()> {
        self.check_dim(&s.input)?;
        match self.samples.get(&s.input).copied() {
            None | Some(None) => {
                if s.output.is_some() || !self.samples.contains_key(&s.input) {
                    self.samples.insert(s.input, s.output);
                }
                Ok(())
            }
            Some(Some(old)) => match s.output {
                Some(new) if new != old => Err(Error::ConflictingSample {
                    input: s.input.to_string(),
                }),
                _ => Ok(()),
            },
        }
    }

    pub fn with(&self, s: Sample) -> Result<Self> {
        let mut out = self.clone();
        out.insert(s)?;
        Ok(out)
    }

    pub fn n_inputs(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.samples.contains_key(v)
    }

    pub fn get(&self, v: &BitVector) -> Option<Option<bool>> {
        self.samples.get(v).copied()
    }

    /// True iff every sample has an output.
    pub fn is_valued(&self) -> bool {
        self.samples.values().all(Option::is_some)
    }

    pub fn iter(&self) -> impl Iterator<Item = Sample> + '_ {
        self.samples.iter().map(|(k, v)| Sample::new(*k, *v))
    }

    pub fn inputs(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.samples.keys().copied()
    }

    /// Samples that carry an output.
    pub fn labeled(&self) -> impl Iterator<Item = (BitVector, bool)> + '_ {
        self.samples.iter().filter_map(|(k, v)| v.map(|b| (*k, b)))
    }

    /// The labeled part as its own set.
    pub fn valued_part(&self) -> SampleSet {
        SampleSet {
            n: self.n,
            samples: self
                .samples
                .iter()
                .filter(|(_, v)| v.is_some())
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    pub fn positives(&self) -> impl Iterator<Item = BitVector> + '_ {
        self.labeled().filter(|(_, b)| *b).map(|(v, _)| v)
    }

    /// Errors unless every sample is labeled and the set is nonempty.
    pub fn require_valued(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptySamples);
        }
        if let Some((v, _)) = self.samples.iter().find(|(_, o)| o.is_none()) {
            return Err(Error::UnlabeledSample { input: v.to_string() });
        }
        Ok(())
    }

    /// Whether `c` agrees with every labeled sample.
    pub fn fits(&self, c: &Circuit) -> Result<bool> {
        for (v, b) in self.labeled() {
            if c.evaluate(&v)? != b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `f` agrees with every labeled sample.
    pub fn agrees_with(&self, f: &TruthTable) -> bool {
        self.labeled().all(|(v, b)| f.at(&v) == b)
    }
}

#[derive(Serialize)]
struct SampleRow {
    input: String,
    output: Option<bool>,
}

impl Serialize for SampleSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<SampleRow> = self
            .iter()
            .map(|x| SampleRow {
                input: x.input.to_string(),
                output: x.output,
            })
            .collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn conflicting_labels_rejected() {
        let mut s = SampleSet::new(2);
        s.insert(Sample::labeled(bv("10"), true)).unwrap();
        s.insert(Sample::labeled(bv("10"), true)).unwrap();
        s.insert(Sample::new(bv("10"), None)).unwrap();
        assert_eq!(s.get(&bv("10")), Some(Some(true)));
        assert!(matches!(
            s.insert(Sample::labeled(bv("10"), false)),
            Err(Error::ConflictingSample { .. })
        ));
    }

    #[test]
    fn unlabeled_can_be_upgraded() {
        let mut s = SampleSet::new(2);
        s.insert(Sample::new(bv("01"), None)).unwrap();
        assert!(!s.is_valued());
        s.insert(Sample::labeled(bv("01"), false)).unwrap();
        assert!(s.is_valued());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn iteration_is_row_order() {
        let s = SampleSet::from_samples(
            2,
            [bv("11"), bv("10"), bv("01")].map(|v| Sample::labeled(v, true)),
        )
        .unwrap();
        let order: Vec<String> = s.inputs().map(|v| v.to_string()).collect();
        assert_eq!(order, ["10", "01", "11"]);
    }

    #[test]
    fn dimension_checked() {
        let mut s = SampleSet::new(3);
        assert!(matches!(
            s.insert(Sample::labeled(bv("10"), true)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::bits::BitVector;
use crate::circuit::GateKind;
use crate::error::ParseError;

/// Values of f over all of B^N, indexed by [`BitVector::index`] (b_1 varies
/// fastest). Stored as packed 64-bit words; unused high bits stay zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

const VAR_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl TruthTable {
    /// Default ceiling on N for exhaustive tables.
    pub const DEFAULT_LIMIT: usize = 20;

    fn word_count(n: usize) -> usize {
        if n <= 6 {
            1
        } else {
            1 << (n - 6)
        }
    }

    fn tail_mask(n: usize) -> u64 {
        if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1 << n)) - 1
        }
    }

    fn trimmed(mut self) -> Self {
        let m = Self::tail_mask(self.n);
        if let Some(w) = self.words.last_mut() {
            *w &= m;
        }
        self
    }

    pub fn constant(n: usize, value: bool) -> Self {
        assert!((1..=Self::DEFAULT_LIMIT).contains(&n), "table dimension {n} out of range");
        let w = if value { u64::MAX } else { 0 };
        TruthTable {
            n,
            words: vec![w; Self::word_count(n)],
        }
        .trimmed()
    }

    /// Table of the projection onto b_{j+1}.
    pub fn variable(n: usize, j: usize) -> Self {
        assert!(j < n);
        let mut t = TruthTable::constant(n, false);
        if j < 6 {
            for w in &mut t.words {
                *w = VAR_MASKS[j];
            }
        } else {
            let period = 1usize << (j - 6);
            for (i, w) in t.words.iter_mut().enumerate() {
                if (i / period) % 2 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        t.trimmed()
    }

    pub fn from_fn(n: usize, f: impl Fn(BitVector) -> bool) -> Self {
        let mut t = TruthTable::constant(n, false);
        for v in BitVector::all(n) {
            if f(v) {
                t.set(v.index(), true);
            }
        }
        t
    }

    /// Builds from the low 2^N bits of `bits` (N ≤ 6).
    pub fn from_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 6);
        TruthTable {
            n,
            words: vec![bits],
        }
        .trimmed()
    }

    /// Packed value for N ≤ 6.
    pub fn as_u64(&self) -> Option<u64> {
        (self.n <= 6).then(|| self.words[0])
    }

    pub fn n_inputs(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, index: usize) -> bool {
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn at(&self, v: &BitVector) -> bool {
        debug_assert_eq!(v.len(), self.n);
        self.get(v.index())
    }

    pub fn set(&mut self, index: usize, value: bool) {
        let (w, b) = (index / 64, index % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn not(&self) -> Self {
        TruthTable {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        }
        .trimmed()
    }

    pub fn combine(&self, other: &TruthTable, gate: GateKind) -> Self {
        assert_eq!(self.n, other.n);
        TruthTable {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| gate.apply_words(*a, *b))
                .collect(),
        }
    }

    /// Points where the two tables differ, in index order.
    pub fn differences<'a>(&'a self, other: &'a TruthTable) -> impl Iterator<Item = BitVector> + 'a {
        BitVector::all(self.n).filter(move |v| self.at(v) != other.at(v))
    }

    pub fn is_constant(&self) -> Option<bool> {
        if self.count_ones() == 0 {
            Some(false)
        } else if self.count_ones() == self.len() {
            Some(true)
        } else {
            None
        }
    }

    /// One character per row, row 0 first.
    pub fn to_bitstring(&self) -> String {
        (0..self.len())
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    pub fn from_bitstring(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let len = s.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(ParseError::new(
                1,
                1,
                format!("truth table length {len} is not 2^N for N >= 1"),
            ));
        }
        let n = len.trailing_zeros() as usize;
        if n > Self::DEFAULT_LIMIT {
            return Err(ParseError::new(1, 1, format!("N={n} exceeds limit")));
        }
        let mut t = TruthTable::constant(n, false);
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => t.set(i, true),
                other => {
                    return Err(ParseError::new(
                        1,
                        i + 1,
                        format!("unexpected character '{other}' in truth table"),
                    ))
                }
            }
        }
        Ok(t)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(N={}, {})", self.n, self.to_bitstring())
    }
}

impl FromStr for TruthTable {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TruthTable::from_bitstring(s)
    }
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables_match_pointwise_definition() {
        for n in [1, 3, 7, 8] {
            for j in 0..n {
                let t = TruthTable::variable(n, j);
                for v in BitVector::all(n) {
                    assert_eq!(t.at(&v), v.get(j), "n={n} j={j} v={v}");
                }
            }
        }
    }

    #[test]
    fn bitstring_round_trip() {
        let t: TruthTable = "0110".parse().unwrap();
        assert_eq!(t.n_inputs(), 2);
        assert_eq!(t.to_string(), "0110");
        assert!("011".parse::<TruthTable>().is_err());
        assert!("01a0".parse::<TruthTable>().is_err());
    }

    #[test]
    fn not_stays_trimmed() {
        let t = TruthTable::constant(2, false).not();
        assert_eq!(t.as_u64(), Some(0b1111));
        assert_eq!(t, TruthTable::constant(2, true));
    }
}

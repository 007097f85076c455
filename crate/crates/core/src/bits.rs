use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// Largest supported input dimension.
pub const MAX_INPUTS: usize = 32;

/// A point of B^N. Bit `j` of `bits` holds b_{j+1}, so the packed value is
/// also the truth-table row index (b_1 varies fastest).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: u8,
    bits: u32,
}

impl BitVector {
    pub fn new(n: usize, bits: u32) -> Self {
        assert!((1..=MAX_INPUTS).contains(&n), "dimension {n} out of range");
        let mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        BitVector {
            n: n as u8,
            bits: bits & mask,
        }
    }

    /// Builds from explicit values b_1..b_N.
    pub fn from_bits(values: &[bool]) -> Self {
        let bits = values
            .iter()
            .enumerate()
            .fold(0u32, |acc, (j, &b)| acc | ((b as u32) << j));
        BitVector::new(values.len(), bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitVector::new(n, 0)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value of b_{j+1} (0-based `j`).
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len());
        (self.bits >> j) & 1 == 1
    }

    pub fn with(mut self, j: usize, value: bool) -> Self {
        if value {
            self.bits |= 1 << j;
        } else {
            self.bits &= !(1 << j);
        }
        self
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn raw(&self) -> u32 {
        self.bits
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |j| self.get(j))
    }

    /// All of B^N in truth-table order.
    pub fn all(n: usize) -> impl Iterator<Item = BitVector> {
        assert!(n <= 24, "refusing to enumerate B^{n}");
        (0..(1u32 << n)).map(move |b| BitVector::new(n, b))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self)
    }
}

impl FromStr for BitVector {
    type Err = ParseError;

    /// Leftmost character is b_1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_INPUTS {
            return Err(ParseError::new(
                1,
                1,
                format!("bitstring length must be 1..={MAX_INPUTS}"),
            ));
        }
        let mut bits = 0u32;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                other => {
                    return Err(ParseError::new(
                        1,
                        j + 1,
                        format!("unexpected character '{other}' in bitstring"),
                    ))
                }
            }
        }
        Ok(BitVector::new(s.len(), bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leftmost_char_is_b1() {
        let v: BitVector = "110".parse().unwrap();
        assert!(v.get(0) && v.get(1) && !v.get(2));
        assert_eq!(v.index(), 3);
        assert_eq!(v.to_string(), "110");
    }

    #[test]
    fn rejects_bad_characters() {
        let err = "10x".parse::<BitVector>().unwrap_err();
        assert_eq!(err.column, 3);
        assert!("".parse::<BitVector>().is_err());
    }

    #[test]
    fn enumeration_order_matches_truth_table_rows() {
        let rows: Vec<String> = BitVector::all(2).map(|v| v.to_string()).collect();
        assert_eq!(rows, ["00", "10", "01", "11"]);
    }
}

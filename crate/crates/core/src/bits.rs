//! Bit sequences exchanged and stored by the stations.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{domain, Result};

/// An ordered sequence of bits, one `u8` (0 or 1) per bit.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    /// Wraps a vector of 0/1 values.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(domain(alloc::format!(
                "bit sequence holds non-binary value {} at position {pos}",
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(alloc::vec![0; len])
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    /// Unpacks `len` bits from bytes, most significant bit first.
    pub fn from_bytes_msb(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(domain(alloc::format!(
                "{len} bits requested from {} bytes",
                bytes.len()
            )));
        }
        Ok(Self(
            (0..len)
                .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1)
                .collect(),
        ))
    }

    /// Packs the bits into bytes, most significant bit first, zero padded.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut out = alloc::vec![0u8; self.0.len().div_ceil(8)];
        for (i, &b) in self.0.iter().enumerate() {
            out[i / 8] |= b << (7 - i % 8);
        }
        out
    }

    /// Packs the bits into 64-bit words, least significant bit first.
    pub(crate) fn to_words_lsb(&self) -> Vec<u64> {
        let mut out = alloc::vec![0u64; self.0.len().div_ceil(64)];
        for (i, &b) in self.0.iter().enumerate() {
            out[i / 64] |= u64::from(b) << (i % 64);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<u8> {
        self.0.get(index).copied()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Flips the bit at `index`. Panics when out of range.
    pub fn flip(&mut self, index: usize) {
        self.0[index] ^= 1;
    }

    /// Bitwise XOR of two equal-length sequences.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_same_len(other)?;
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Number of positions where the two sequences differ.
    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        self.check_same_len(other)?;
        Ok(self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count())
    }

    /// Fraction of ones.
    pub fn weight_fraction(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().map(|&b| b as usize).sum::<usize>() as f64 / self.0.len() as f64
    }

    fn check_same_len(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() {
            return Err(domain(alloc::format!(
                "bit sequence length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence[{}](", self.0.len())?;
        for &b in self.0.iter().take(64) {
            write!(f, "{b}")?;
        }
        if self.0.len() > 64 {
            f.write_str("...")?;
        }
        f.write_str(")")
    }
}

impl TryFrom<Vec<u8>> for BitSequence {
    type Error = crate::Error;

    fn try_from(bits: Vec<u8>) -> Result<Self> {
        Self::new(bits)
    }
}

impl FromIterator<bool> for BitSequence {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self::from_bools(iter)
    }
}

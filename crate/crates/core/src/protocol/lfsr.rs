//! Fibonacci LFSR basis expander.
//!
//! A `K_M`-bit key block seeds a maximal-length register whose successive
//! states select one basis per bit instead of one basis per block.

use alloc::vec::Vec;

use crate::bits::BitSequence;
use crate::error::{domain, Error, Result};

/// Tap exponents of a primitive polynomial for each supported width.
/// `x^w` is always present; the constant term is implicit.
const PRIMITIVE_TAPS: [&[u32]; 14] = [
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 11, 10, 4],
    &[13, 12, 11, 8],
    &[14, 13, 12, 2],
    &[15, 14],
    &[16, 15, 13, 4],
];

pub const MIN_WIDTH: u32 = 3;
pub const MAX_WIDTH: u32 = 16;

/// Tap mask (bit `t − 1` set for each exponent `t`) of the table polynomial
/// for `width`.
pub fn primitive_taps(width: u32) -> Result<u32> {
    if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
        return Err(domain(alloc::format!(
            "no primitive polynomial tabulated for LFSR width {width} (supported: {MIN_WIDTH}..={MAX_WIDTH})"
        )));
    }
    Ok(taps_mask(PRIMITIVE_TAPS[(width - MIN_WIDTH) as usize]))
}

/// Mask for a list of tap exponents.
pub fn taps_mask(exponents: &[u32]) -> u32 {
    exponents.iter().fold(0, |acc, &t| acc | 1 << (t - 1))
}

/// Register width, tap mask and non-zero seed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LfsrSpec {
    width: u32,
    taps: u32,
    seed: u32,
}

impl LfsrSpec {
    pub fn new(width: u32, taps: u32, seed: u32) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(domain(alloc::format!("LFSR width {width} out of range")));
        }
        let mask = (1u32 << width) - 1;
        if taps & !mask != 0 || taps & (1 << (width - 1)) == 0 {
            return Err(domain(alloc::format!(
                "tap mask {taps:#b} must include x^{width} and stay within the register"
            )));
        }
        if seed & !mask != 0 {
            return Err(domain(alloc::format!("seed {seed:#b} wider than {width} bits")));
        }
        if seed == 0 {
            return Err(Error::DegenerateSeed);
        }
        Ok(Self { width, taps, seed })
    }

    /// Table polynomial for `seed.len()` bits, seeded big-endian.
    pub fn primitive(seed: &BitSequence) -> Result<Self> {
        let width = seed.len() as u32;
        let taps = primitive_taps(width)?;
        let state = seed.iter().fold(0u32, |acc, b| (acc << 1) | u32::from(b));
        Self::new(width, taps, state)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn taps(&self) -> u32 {
        self.taps
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    pub fn iter(&self) -> Lfsr {
        Lfsr {
            state: self.seed,
            taps: self.taps,
            mask: (1u32 << self.width) - 1,
        }
    }
}

/// Running register. Yields the state after each shift.
#[derive(Debug, Clone)]
pub struct Lfsr {
    state: u32,
    taps: u32,
    mask: u32,
}

impl Iterator for Lfsr {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let feedback = (self.state & self.taps).count_ones() & 1;
        self.state = ((self.state << 1) | feedback) & self.mask;
        Some(self.state)
    }
}

/// The next `count` register states, read as basis indices.
pub fn lfsr_expand(spec: &LfsrSpec, count: usize) -> Vec<u32> {
    spec.iter().take(count).collect()
}

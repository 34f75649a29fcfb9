//! Random sources.
//!
//! Each station owns a [`PhysicalRandom`] source standing in for its physical
//! random generator. The default, [`SeededPhrg`], is a ChaCha-based counter
//! generator: reproducible, statistically good, and of course not physically
//! random. Simulations that need real entropy can plug in another
//! implementation.

use rand::{RngCore, SeedableRng};
use rand_chacha::{ChaCha12Rng, ChaCha8Rng};

use crate::bits::BitSequence;

/// Source of fresh random bits for a station.
pub trait PhysicalRandom {
    fn fill_bits(&mut self, len: usize) -> BitSequence;
}

/// Deterministic stand-in for a physical random generator.
#[derive(Debug, Clone)]
pub struct SeededPhrg {
    rng: ChaCha12Rng,
}

impl SeededPhrg {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }
}

impl PhysicalRandom for SeededPhrg {
    fn fill_bits(&mut self, len: usize) -> BitSequence {
        let mut bits = alloc::vec::Vec::with_capacity(len);
        while bits.len() < len {
            let word = self.rng.next_u64();
            let take = (len - bits.len()).min(64);
            bits.extend((0..take).map(|i| ((word >> i) & 1) as u8));
        }
        BitSequence::new(bits).expect("bits are binary")
    }
}

impl<T: PhysicalRandom + ?Sized> PhysicalRandom for &mut T {
    fn fill_bits(&mut self, len: usize) -> BitSequence {
        (**self).fill_bits(len)
    }
}

/// Independent stream `stream` of the generator seeded with `seed`.
///
/// Monte Carlo chunks and protocol cycles use this so that results do not
/// depend on how work is split or replayed.
pub fn derived_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

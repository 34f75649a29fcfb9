//! Operating-system entropy as a bit source.

use mesokey_core::bits::BitSequence;
use mesokey_core::rng::PhysicalRandom;
use rand::rngs::OsRng;
use rand::TryRngCore;

/// Fresh bits from the operating system. Runs using it are not
/// reproducible.
#[derive(Debug, Clone, Copy, Default)]
pub struct OsEntropy;

impl PhysicalRandom for OsEntropy {
    fn fill_bits(&mut self, len: usize) -> BitSequence {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        OsRng
            .try_fill_bytes(&mut bytes)
            .expect("operating system entropy source failed");
        BitSequence::from_bytes_msb(&bytes, len).expect("length fits the buffer")
    }
}

//! Key distillation: hash verification and Toeplitz privacy amplification.
//!
//! Both use binary Toeplitz matrices drawn from a public seed. A random
//! `m × L` Toeplitz matrix is a universal hash family, so two different keys
//! collide on a `t`-bit digest with probability `2^{−t}`.

use alloc::vec::Vec;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::bits::BitSequence;
use crate::error::{domain, Result};

/// `m`-bit Toeplitz image of `key`. Row `i` of the matrix is the seed
/// sequence `s[i .. i + L]` read against the reversed key.
pub fn toeplitz_hash(key: &BitSequence, output_len: usize, hash_seed: u64) -> Result<BitSequence> {
    let len = key.len();
    if output_len == 0 {
        return Ok(BitSequence::default());
    }
    if len == 0 {
        return Err(domain("cannot hash an empty key"));
    }
    let seed_bits = len + output_len - 1;
    let seed_words = seed_bits.div_ceil(64) + 2;
    let mut rng = ChaCha12Rng::seed_from_u64(hash_seed);
    let mut diagonal: Vec<u64> = (0..seed_words).map(|_| rng.next_u64()).collect();
    // only seed_bits bits are meaningful
    if !seed_bits.is_multiple_of(64) {
        let last = seed_bits / 64;
        diagonal[last] &= (1u64 << (seed_bits % 64)) - 1;
    }
    for w in diagonal.iter_mut().skip(seed_bits.div_ceil(64)) {
        *w = 0;
    }

    let reversed: BitSequence = key.as_slice().iter().rev().map(|&b| b == 1).collect();
    let key_words = reversed.to_words_lsb();

    let bits = (0..output_len).map(|i| {
        let (word, shift) = (i / 64, i % 64);
        let parity = key_words.iter().enumerate().fold(0u32, |acc, (w, &k)| {
            let lo = diagonal[word + w] >> shift;
            let hi = if shift == 0 { 0 } else { diagonal[word + w + 1] << (64 - shift) };
            acc ^ ((lo | hi) & k).count_ones()
        });
        parity & 1 == 1
    });
    Ok(bits.collect())
}

/// Compresses `key` to `output_len` bits.
pub fn privacy_amplify(key: &BitSequence, output_len: usize, hash_seed: u64) -> Result<BitSequence> {
    if output_len > key.len() {
        return Err(domain(alloc::format!(
            "cannot amplify {} bits into {output_len}",
            key.len()
        )));
    }
    toeplitz_hash(key, output_len, hash_seed)
}

/// `t`-bit digest exchanged during verification.
pub fn verification_digest(key: &BitSequence, check_bits: usize, hash_seed: u64) -> Result<BitSequence> {
    toeplitz_hash(key, check_bits, hash_seed)
}

/// Result of comparing digests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Verified {
        digest: BitSequence,
        /// Set when `t = 0`: nothing was actually compared.
        degenerate: bool,
    },
    Abort(MismatchReport),
}

impl Verification {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MismatchReport {
    pub digest_a: BitSequence,
    pub digest_b: BitSequence,
    /// Number of digest bits that differ.
    pub differing_bits: usize,
}

/// Compares `t`-bit digests of both stations' keys.
pub fn reconcile_and_verify(
    key_a: &BitSequence,
    key_b: &BitSequence,
    check_bits: usize,
    hash_seed: u64,
) -> Result<Verification> {
    if key_a.len() != key_b.len() {
        return Err(domain(alloc::format!(
            "key lengths differ: {} vs {}",
            key_a.len(),
            key_b.len()
        )));
    }
    let digest_a = verification_digest(key_a, check_bits, hash_seed)?;
    let digest_b = verification_digest(key_b, check_bits, hash_seed)?;
    if digest_a == digest_b {
        return Ok(Verification::Verified {
            digest: digest_a,
            degenerate: check_bits == 0,
        });
    }
    let differing_bits = digest_a.hamming_distance(&digest_b)?;
    Ok(Verification::Abort(MismatchReport {
        digest_a,
        digest_b,
        differing_bits,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{PhysicalRandom, SeededPhrg};

    /// Direct evaluation of the Toeplitz product, one matrix entry at a time.
    fn toeplitz_reference(key: &BitSequence, m: usize, hash_seed: u64) -> BitSequence {
        let len = key.len();
        let n_bits = len + m - 1;
        let mut rng = ChaCha12Rng::seed_from_u64(hash_seed);
        let words: Vec<u64> = (0..n_bits.div_ceil(64) + 1).map(|_| rng.next_u64()).collect();
        let s = |i: usize| ((words[i / 64] >> (i % 64)) & 1) as u8;
        (0..m)
            .map(|i| {
                (0..len).fold(0u8, |acc, j| acc ^ (s(i + len - 1 - j) & key.get(j).unwrap())) == 1
            })
            .collect()
    }

    #[test]
    fn packed_product_matches_reference() {
        let mut src = SeededPhrg::new(11);
        for (len, m) in [(1, 1), (5, 3), (64, 64), (65, 10), (200, 130), (130, 1)] {
            let key = src.fill_bits(len);
            for seed in [0u64, 9] {
                assert_eq!(toeplitz_hash(&key, m, seed).unwrap(), toeplitz_reference(&key, m, seed), "L={len}, m={m}");
            }
        }
    }

    #[test]
    fn output_length_contract() {
        let key = SeededPhrg::new(1).fill_bits(1024);
        assert_eq!(privacy_amplify(&key, 512, 3).unwrap().len(), 512);
        assert_eq!(privacy_amplify(&key, 1024, 3).unwrap().len(), 1024);
        assert!(privacy_amplify(&key, 1025, 3).is_err());
        assert!(privacy_amplify(&key, 0, 3).unwrap().is_empty());
    }

    #[test]
    fn verification_outcomes() {
        let key = SeededPhrg::new(2).fill_bits(256);
        assert!(reconcile_and_verify(&key, &key, 64, 5).unwrap().is_verified());
        let mut tampered = key.clone();
        tampered.flip(17);
        match reconcile_and_verify(&key, &tampered, 64, 5).unwrap() {
            Verification::Abort(report) => assert!(report.differing_bits > 0),
            v => panic!("expected abort, got {v:?}"),
        }
        assert_eq!(
            reconcile_and_verify(&key, &tampered, 0, 5).unwrap(),
            Verification::Verified {
                digest: BitSequence::default(),
                degenerate: true
            }
        );
        assert!(reconcile_and_verify(&key, &BitSequence::zeros(3), 64, 5).is_err());
    }
}

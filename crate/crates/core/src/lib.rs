//! Core algorithms for a coherent-state, M-ry phase-ciphered key distribution
//! laboratory.
//!
//! The crate is `no_std` (it needs `alloc`) and carries no IO. It covers:
//!
//! * [`mry`]: cipher-wheel phases, coherent-state overlaps, shot-noise angle
//!   uncertainty and phase-measurement bounds.
//! * [`helstrom`]: the eavesdropper's minimum error probability, computed from
//!   the truncated difference density matrix in the angular-momentum basis,
//!   plus the derived information quantities.
//! * [`protocol`]: the chained key-exchange state machine, the LFSR basis
//!   expander and key distillation (hash verification, Toeplitz privacy
//!   amplification).
//! * [`channel`]: Gaussian phase-noise channel, eavesdropper strategies and the
//!   Monte Carlo bit-error-rate harness.
//!
//! [`bessel`] and [`linalg`] are the numerical kernels behind [`helstrom`].
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bessel;
pub mod bits;
pub mod channel;
pub mod error;
pub mod helstrom;
pub mod linalg;
pub mod mry;
pub mod protocol;
pub mod rng;

pub use bits::BitSequence;
pub use error::{Error, Result};
pub use mry::SystemParams;

//! Geometry of the M-ry cipher wheel.
//!
//! Each of the `M` bases is a pair of antipodal phases `{φ_k, φ_k + π}` carrying
//! bits 0 and 1. Adjacent wheel positions carry mostly opposite bit values, so
//! an observer who cannot resolve neighbouring bases cannot read the bit.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Tolerance used when comparing reduced angles.
pub const ANGLE_TOLERANCE: f64 = 1e-9;

/// Operating point shared by every computation: mean photon number per bit,
/// number of bases, repetition count and receiver transmittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    mean_photon_number: f64,
    num_bases: u32,
    repetition: u32,
    transmittance: f64,
}

impl SystemParams {
    pub fn new(mean_photon_number: f64, num_bases: u32) -> Result<Self> {
        if !(mean_photon_number > 0.0 && mean_photon_number.is_finite()) {
            return Err(domain(alloc::format!(
                "mean photon number must be finite and > 0, got {mean_photon_number}"
            )));
        }
        if num_bases == 0 {
            return Err(domain("number of bases must be >= 1"));
        }
        Ok(Self {
            mean_photon_number,
            num_bases,
            repetition: 1,
            transmittance: 1.0,
        })
    }

    pub fn with_repetition(mut self, repetition: u32) -> Result<Self> {
        if repetition == 0 {
            return Err(domain("repetition must be >= 1"));
        }
        self.repetition = repetition;
        Ok(self)
    }

    pub fn with_transmittance(mut self, transmittance: f64) -> Result<Self> {
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(domain(alloc::format!(
                "transmittance must lie in (0, 1], got {transmittance}"
            )));
        }
        self.transmittance = transmittance;
        Ok(self)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.mean_photon_number
    }

    pub fn num_bases(&self) -> u32 {
        self.num_bases
    }

    pub fn repetition(&self) -> u32 {
        self.repetition
    }

    pub fn transmittance(&self) -> f64 {
        self.transmittance
    }

    /// Coherent amplitude `|α| = √⟨n⟩`.
    pub fn amplitude(&self) -> f64 {
        libm::sqrt(self.mean_photon_number)
    }

    /// `K_M = ⌈log₂ M⌉`, the number of key bits that select one basis.
    pub fn key_bits_per_basis(&self) -> u32 {
        key_bits_per_basis(self.num_bases)
    }

    pub fn bases_are_power_of_two(&self) -> bool {
        self.num_bases.is_power_of_two()
    }

    /// Photon number seen by an eavesdropper sampling at the source: all `r`
    /// repetitions, no loss.
    pub fn source_photon_number(&self) -> f64 {
        self.mean_photon_number * f64::from(self.repetition)
    }

    /// Photon number per pulse at the legitimate receiver.
    pub fn receiver_photon_number(&self) -> f64 {
        self.mean_photon_number * self.transmittance
    }

    /// `r·η·⟨n⟩`.
    pub fn effective_photon_number(&self) -> f64 {
        self.mean_photon_number * f64::from(self.repetition) * self.transmittance
    }
}

/// `⌈log₂ M⌉` (0 for `M = 1`).
pub fn key_bits_per_basis(num_bases: u32) -> u32 {
    match num_bases {
        0 | 1 => 0,
        m => u32::BITS - (m - 1).leading_zeros(),
    }
}

/// Reduces an angle into `[0, 2π)`.
pub fn reduce_angle(angle: f64) -> f64 {
    let m = libm::fmod(angle, TWO_PI);
    let r = if m < 0.0 { m + TWO_PI } else { m };
    // adding 2π can round up to exactly 2π for tiny negative inputs
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two angles on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    d.min(TWO_PI - d)
}

/// Whether two angles coincide on the circle within [`ANGLE_TOLERANCE`].
pub fn angles_equal(a: f64, b: f64) -> bool {
    circular_distance(a, b) < ANGLE_TOLERANCE
}

/// One position on the cipher wheel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelPhase {
    pub basis_index: u32,
    /// Radians in `[0, 2π)`.
    pub phase: f64,
}

/// Wheel position of basis `k` in units of `π/M`, in `[0, 2M)`.
///
/// Odd bases sit half a turn away from their natural position, which makes
/// adjacent wheel points alternate between bit 0 and bit 1.
pub(crate) fn wheel_units(k: u32, num_bases: u32) -> u64 {
    u64::from(k) + if k % 2 == 1 { u64::from(num_bases) } else { 0 }
}

/// `φ_k = π[k/M + (1 − (−1)^k)/2]`.
pub fn cipher_phase(k: u32, num_bases: u32) -> Result<WheelPhase> {
    if num_bases == 0 || k >= num_bases {
        return Err(domain(alloc::format!(
            "basis index {k} out of range for M = {num_bases}"
        )));
    }
    let odd = if k % 2 == 1 { 1.0 } else { 0.0 };
    let phase = reduce_angle(PI * (f64::from(k) / f64::from(num_bases) + odd));
    Ok(WheelPhase {
        basis_index: k,
        phase,
    })
}

/// Squared overlap `exp(−2n[1 − cos(Δφ/2)])` of two ciphered states on a
/// common great circle.
pub fn bases_overlap(delta_phi: f64, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(domain(alloc::format!(
            "mean photon number must be >= 0, got {n}"
        )));
    }
    Ok(libm::exp(-2.0 * n * (1.0 - libm::cos(delta_phi / 2.0))))
}

/// Shot-noise uncertainty of the Poincaré angle, `σ = 1/√n`.
pub fn angle_sigma(n: f64) -> Result<f64> {
    if !(n > 0.0) {
        return Err(domain(alloc::format!(
            "mean photon number must be > 0, got {n}"
        )));
    }
    Ok(1.0 / libm::sqrt(n))
}

/// Number of wheel bases covered by one standard deviation,
/// `N_σ = M/(π√(r·η·⟨n⟩))`.
pub fn bases_within_sigma(params: &SystemParams) -> f64 {
    f64::from(params.num_bases()) / (PI * libm::sqrt(params.effective_photon_number()))
}

/// A-priori probabilities of drawing an even or an odd basis index when `k`
/// is uniform over `[0, M)`. The pair sums to exactly 1.
pub fn apriori_parity_probs(num_bases: u32) -> Result<(f64, f64)> {
    if num_bases == 0 {
        return Err(domain("number of bases must be >= 1"));
    }
    let m = u64::from(num_bases);
    let sign_term = if m % 2 == 0 { 0 } else { 2 };
    let p_even = (sign_term + 2 * m) as f64 / (4 * m) as f64;
    // p_even >= 1/2, so this subtraction is exact
    Ok((p_even, 1.0 - p_even))
}

/// Smallest phase shifts resolvable with `N` photons, and the indistinguishability
/// test for a wheel of `M` bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBounds {
    /// Standard quantum limit `1/√N`.
    pub standard_quantum_limit: f64,
    /// Squeezed-light limit `1/N^{3/4}`.
    pub squeezed: f64,
    /// Heisenberg limit with the scan restricted to a `1/M` fraction of the
    /// pulse: `1/((1/M)N)`.
    pub heisenberg: f64,
    /// Spacing of adjacent bases, `π/M`.
    pub min_interval: f64,
    /// `M > √(πN)`.
    pub indistinguishable: bool,
}

pub fn phase_bounds(photons: f64, num_bases: u32) -> Result<PhaseBounds> {
    if !(photons > 0.0) || num_bases == 0 {
        return Err(domain("phase bounds need N > 0 and M >= 1"));
    }
    let m = f64::from(num_bases);
    Ok(PhaseBounds {
        standard_quantum_limit: 1.0 / libm::sqrt(photons),
        squeezed: 1.0 / libm::pow(photons, 0.75),
        heisenberg: m / photons,
        min_interval: PI / m,
        indistinguishable: m > libm::sqrt(PI * photons),
    })
}

/// Smallest integer `M` with `M > √(πN)`.
pub fn heisenberg_min_bases(photons: f64) -> Result<u64> {
    if !(photons > 0.0) {
        return Err(domain(alloc::format!("photon number must be > 0, got {photons}")));
    }
    Ok(libm::floor(libm::sqrt(PI * photons)) as u64 + 1)
}

/// Number of bases that keeps `N_σ` unchanged when every bit is repeated `r`
/// times: `M·√r`.
pub fn repetition_adjusted_bases(num_bases: u32, repetition: u32) -> f64 {
    f64::from(num_bases) * libm::sqrt(f64::from(repetition))
}

/// Bit rate after repeating each bit `2·K_M` times, `rate / (2⌈log₂ M⌉)`.
pub fn repeated_bit_rate(base_rate: f64, num_bases: u64) -> f64 {
    let k = num_bases.max(2).next_power_of_two().trailing_zeros();
    base_rate / (2.0 * f64::from(k))
}

/// A point on the Poincaré sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincarePoint {
    theta: f64,
    phi: f64,
}

impl PoincarePoint {
    /// `theta` must lie in `[0, π]`; `phi` is reduced into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(domain(alloc::format!(
                "invalid Poincaré point (theta = {theta}, phi = {phi})"
            )));
        }
        Ok(Self {
            theta,
            phi: reduce_angle(phi),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Projections `(γ, δ)` on the modulator's x and y axes, normalized so
    /// that `|γ|² + |δ|² = 1`.
    pub fn projections(&self) -> (Complex64, Complex64) {
        let (c, s) = (libm::cos(self.theta / 2.0), libm::sin(self.theta / 2.0));
        let plus = Complex64::from_polar(1.0, self.phi / 2.0);
        let minus = Complex64::from_polar(1.0, -self.phi / 2.0);
        let one_minus_i = Complex64::new(1.0, -1.0);
        let one_plus_i = Complex64::new(1.0, 1.0);
        // the raw projections have |γ|² + |δ|² = 4
        let gamma = (one_minus_i * plus * c + one_plus_i * minus * s) * 0.5;
        let delta = (one_plus_i * plus * c + one_minus_i * minus * s) * 0.5;
        (gamma, delta)
    }
}

/// `|⟨Ψ(a)|Ψ(b)⟩|²` for two-mode coherent states of total mean photon number
/// `n`, computed mode by mode from the x/y projections.
pub fn polarization_overlap(a: &PoincarePoint, b: &PoincarePoint, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(domain(alloc::format!(
            "mean photon number must be >= 0, got {n}"
        )));
    }
    let (ga, da) = a.projections();
    let (gb, db) = b.projections();
    let distance_sq = (ga - gb).norm_sqr() + (da - db).norm_sqr();
    Ok(libm::exp(-n * distance_sq))
}

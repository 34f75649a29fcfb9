//! Phase-noise channel, eavesdropper strategies and the Monte Carlo harness.
//!
//! A pulse of mean photon number `n` is read with its phase displaced by
//! Gaussian shot noise of variance `1/n`. The legitimate receiver loses a
//! fraction of the light (`η`); the eavesdropper taps at the source and keeps
//! all of it. Both observe the same noise realization, scaled by their own
//! standard deviation.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bits::BitSequence;
use crate::error::{domain, Result};
use crate::mry::{circular_distance, cipher_phase, reduce_angle, SystemParams};
use crate::protocol::{demodulate, modulate};
use crate::rng::derived_rng;

/// Trials per independently seeded Monte Carlo chunk. Chunk `c` draws from
/// stream `c` of the run seed, so the pooled estimate does not depend on how
/// chunks are distributed over workers.
pub const MC_CHUNK: u64 = 1 << 14;

/// Minimum number of Monte Carlo trials.
pub const MIN_TRIALS: u64 = 1000;

/// One recorded pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    /// `φ_b + φ_k`, in `[0, 2π)`.
    pub true_phase: f64,
    /// In `[0, 2π)`.
    pub measured_phase: f64,
    pub pulse_index: u64,
    pub repetition_index: u32,
}

/// Noise model of the optical channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelModel {
    /// Gaussian phase noise with variance `1/n`.
    #[default]
    ShotNoise,
    /// The `n → ∞` limit: phases arrive exactly.
    Noiseless,
}

impl ChannelModel {
    /// Phase standard deviation for a pulse of `photons` mean photon number.
    pub fn sigma(&self, photons: f64) -> f64 {
        match self {
            ChannelModel::ShotNoise => 1.0 / libm::sqrt(photons),
            ChannelModel::Noiseless => 0.0,
        }
    }
}

/// What the receiver and a source-side eavesdropper see of one bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseObservation {
    pub receiver: Vec<MeasurementRecord>,
    pub eavesdropper: Vec<MeasurementRecord>,
}

/// Sends one bit's `r` pulses. Each repetition draws one standard-normal
/// displacement, scaled by `1/√(η n)` for the receiver and `1/√n` for the
/// eavesdropper.
pub fn observe<R: Rng + ?Sized>(
    true_phase: f64,
    pulse_index: u64,
    params: &SystemParams,
    channel: ChannelModel,
    rng: &mut R,
) -> PulseObservation {
    let sigma_rx = channel.sigma(params.receiver_photon_number());
    let sigma_eve = channel.sigma(params.mean_photon_number());
    let true_phase = reduce_angle(true_phase);
    let mut receiver = Vec::with_capacity(params.repetition() as usize);
    let mut eavesdropper = Vec::with_capacity(params.repetition() as usize);
    for repetition_index in 0..params.repetition() {
        let z: f64 = match channel {
            ChannelModel::ShotNoise => StandardNormal.sample(rng),
            ChannelModel::Noiseless => 0.0,
        };
        let record = |sigma: f64| MeasurementRecord {
            true_phase,
            measured_phase: reduce_angle(true_phase + sigma * z),
            pulse_index,
            repetition_index,
        };
        receiver.push(record(sigma_rx));
        eavesdropper.push(record(sigma_eve));
    }
    PulseObservation {
        receiver,
        eavesdropper,
    }
}

/// The receiver's `r` records for one bit.
pub fn transmit<R: Rng + ?Sized>(
    true_phase: f64,
    pulse_index: u64,
    params: &SystemParams,
    channel: ChannelModel,
    rng: &mut R,
) -> Vec<MeasurementRecord> {
    observe(true_phase, pulse_index, params, channel, rng).receiver
}

/// Circular mean of the measured phases, in `[0, 2π)`.
pub fn mean_phase(records: &[MeasurementRecord]) -> f64 {
    if let [single] = records {
        return single.measured_phase;
    }
    let (s, c) = records.iter().fold((0.0, 0.0), |(s, c), r| {
        (s + libm::sin(r.measured_phase), c + libm::cos(r.measured_phase))
    });
    reduce_angle(libm::atan2(s, c))
}

/// Bit carried by wheel point `j·π/M`, `j ∈ [0, 2M)`.
fn grid_bit(j: u64, num_bases: u64) -> u8 {
    let within = j % num_bases;
    let odd = (within % 2 == 1) as u8;
    let upper = (j >= num_bases) as u8;
    odd ^ upper
}

/// Snaps a phase to the nearest of the `2M` wheel points and returns that
/// point's bit.
pub fn nearest_level_bit(phase: f64, num_bases: u32) -> u8 {
    let m = u64::from(num_bases);
    let step = PI / num_bases as f64;
    let j = libm::round(reduce_angle(phase) / step) as u64 % (2 * m);
    grid_bit(j, m)
}

/// Nearest-level guess from one bit's records.
pub fn eve_nearest_level(records: &[MeasurementRecord], num_bases: u32) -> u8 {
    nearest_level_bit(mean_phase(records), num_bases)
}

/// Maximum-likelihood bit under the Gaussian phase model, marginalizing the
/// unknown basis: `argmax_b Σ_k exp(−d(φ, φ_k + bπ)²/2σ²)`. Ties go to 0.
pub fn map_bit(phase: f64, num_bases: u32, sigma: f64) -> u8 {
    let m = u64::from(num_bases);
    let step = PI / num_bases as f64;
    if sigma == 0.0 {
        return nearest_level_bit(phase, num_bases);
    }
    let inv_two_var = 1.0 / (2.0 * sigma * sigma);
    let mut exponents: [Vec<f64>; 2] = [Vec::with_capacity(num_bases as usize), Vec::with_capacity(num_bases as usize)];
    for j in 0..2 * m {
        let d = circular_distance(phase, j as f64 * step);
        exponents[grid_bit(j, m) as usize].push(-d * d * inv_two_var);
    }
    let log_likelihood = |xs: &[f64]| {
        let top = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + libm::log(xs.iter().map(|x| libm::exp(x - top)).sum::<f64>())
    };
    if log_likelihood(&exponents[1]) > log_likelihood(&exponents[0]) {
        1
    } else {
        0
    }
}

/// MAP guess from one bit's records, at the source photon number `n`.
pub fn eve_map_guess(records: &[MeasurementRecord], num_bases: u32, n: f64) -> u8 {
    let sigma = 1.0 / libm::sqrt(n * records.len().max(1) as f64);
    map_bit(mean_phase(records), num_bases, sigma)
}

/// Replays stored records through the receiver's demodulator once the key is
/// known. `records` holds `repetition` consecutive records per bit.
pub fn eve_keyed_replay(
    records: &[MeasurementRecord],
    repetition: u32,
    key_bases: &[u32],
    num_bases: u32,
) -> Result<BitSequence> {
    let r = repetition.max(1) as usize;
    if records.len() != key_bases.len() * r {
        return Err(domain(alloc::format!(
            "{} records do not align with {} bases at repetition {r}",
            records.len(),
            key_bases.len()
        )));
    }
    let bits = records
        .chunks(r)
        .zip(key_bases)
        .map(|(chunk, &k)| demodulate(mean_phase(chunk), k, num_bases))
        .collect::<Result<Vec<u8>>>()?;
    BitSequence::new(bits)
}

/// Eavesdropper decision rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Snap to the nearest wheel point.
    Nearest,
    /// Gaussian maximum likelihood over the unknown basis.
    Map,
    /// Demodulate with the (revealed) key, as the receiver does.
    Keyed,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Nearest, Strategy::Map, Strategy::Keyed];

    pub fn id(&self) -> &'static str {
        match self {
            Strategy::Nearest => "nearest",
            Strategy::Map => "map",
            Strategy::Keyed => "keyed",
        }
    }

    /// Decides one bit from the eavesdropper's records of it.
    pub fn decide(&self, records: &[MeasurementRecord], basis: u32, params: &SystemParams) -> Result<u8> {
        Ok(match self {
            Strategy::Nearest => eve_nearest_level(records, params.num_bases()),
            Strategy::Map => eve_map_guess(records, params.num_bases(), params.mean_photon_number()),
            Strategy::Keyed => demodulate(mean_phase(records), basis, params.num_bases())?,
        })
    }
}

impl FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(Strategy::Nearest),
            "map" => Ok(Strategy::Map),
            "keyed" => Ok(Strategy::Keyed),
            other => Err(domain(alloc::format!(
                "unknown strategy '{other}' (expected nearest, map or keyed)"
            ))),
        }
    }
}

/// Monte Carlo bit-error-rate estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub ber: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl BerEstimate {
    pub fn from_counts(errors: u64, trials: u64) -> Self {
        let ber = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        let std_error = if trials == 0 {
            0.0
        } else {
            libm::sqrt(ber * (1.0 - ber) / trials as f64)
        };
        Self {
            ber,
            std_error,
            trials,
        }
    }
}

/// Number of chunks a run of `trials` is split into.
pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(MC_CHUNK)
}

/// Trials in chunk `chunk` of a run of `trials`.
pub fn chunk_len(trials: u64, chunk: u64) -> u64 {
    MC_CHUNK.min(trials - chunk * MC_CHUNK)
}

/// Errors in one chunk of eavesdropper trials: a uniformly random bit in a
/// uniformly random basis, observed at the source.
pub fn monte_carlo_chunk(
    strategy: Strategy,
    params: &SystemParams,
    channel: ChannelModel,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Result<u64> {
    let mut rng = derived_rng(seed, chunk);
    let m = params.num_bases();
    let mut errors = 0;
    for i in 0..len {
        let bit = rng.random_range(0..2u8);
        let basis = rng.random_range(0..m);
        let phase = modulate(bit, basis, m)?;
        let obs = observe(phase, chunk * MC_CHUNK + i, params, channel, &mut rng);
        if strategy.decide(&obs.eavesdropper, basis, params)? != bit {
            errors += 1;
        }
    }
    Ok(errors)
}

/// Pools per-chunk error counts.
pub fn pool_chunks(trials: u64, errors: impl IntoIterator<Item = u64>) -> BerEstimate {
    BerEstimate::from_counts(errors.into_iter().sum(), trials)
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(domain(alloc::format!(
            "Monte Carlo needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    Ok(())
}

/// Eavesdropper bit-error rate of `strategy`, deterministic in `seed`.
pub fn monte_carlo_ber(
    strategy: Strategy,
    params: &SystemParams,
    channel: ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<BerEstimate> {
    check_trials(trials)?;
    let errors = (0..chunk_count(trials))
        .map(|c| monte_carlo_chunk(strategy, params, channel, seed, c, chunk_len(trials, c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(pool_chunks(trials, errors))
}

/// Outcome of the keyless repeated-read experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XorMismatch {
    /// Fraction of read pairs whose XOR is 1.
    pub rate: f64,
    /// Single-read error rate over all reads of the run.
    pub single_read_ber: f64,
    pub trials: u64,
    /// Binomial standard error of `rate`.
    pub std_error: f64,
}

impl XorMismatch {
    /// `2p(1 − p)`, the mismatch rate of two independent reads.
    pub fn predicted_rate(&self) -> f64 {
        2.0 * self.single_read_ber * (1.0 - self.single_read_ber)
    }
}

/// Sends the same bit in the same basis over and over; a reader without the
/// key decodes pairs of independent pulses by nearest level and XORs them.
pub fn keyless_xor_mismatch(
    params: &SystemParams,
    channel: ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<XorMismatch> {
    if trials == 0 {
        return Err(domain("trials must be >= 1"));
    }
    let mut rng = derived_rng(seed, u64::MAX);
    let m = params.num_bases();
    let bit = rng.random_range(0..2u8);
    let basis = rng.random_range(0..m);
    let phase = modulate(bit, basis, m)?;
    let (mut mismatches, mut read_errors) = (0u64, 0u64);
    for i in 0..trials {
        let first = eve_nearest_level(&observe(phase, 2 * i, params, channel, &mut rng).eavesdropper, m);
        let second = eve_nearest_level(&observe(phase, 2 * i + 1, params, channel, &mut rng).eavesdropper, m);
        mismatches += u64::from(first ^ second);
        read_errors += u64::from(first != bit) + u64::from(second != bit);
    }
    let est = BerEstimate::from_counts(mismatches, trials);
    Ok(XorMismatch {
        rate: est.ber,
        single_read_ber: read_errors as f64 / (2 * trials) as f64,
        trials,
        std_error: est.std_error,
    })
}

/// Phase of wheel point `(k, bit)`.
pub fn wheel_point(k: u32, bit: u8, num_bases: u32) -> Result<f64> {
    let base = cipher_phase(k, num_bases)?.phase;
    Ok(reduce_angle(base + f64::from(bit) * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: f64, m: u32) -> SystemParams {
        SystemParams::new(n, m).unwrap()
    }

    #[test]
    fn grid_points_decode_to_their_bit() {
        for m in [1u32, 2, 3, 8, 32, 33] {
            for k in 0..m {
                for bit in 0..2u8 {
                    let phase = wheel_point(k, bit, m).unwrap();
                    assert_eq!(nearest_level_bit(phase, m), bit, "M={m}, k={k}, b={bit}");
                    assert_eq!(map_bit(phase, m, 0.01), bit);
                }
            }
        }
    }

    #[test]
    fn noiseless_channel_is_exact() {
        let mut rng = derived_rng(0, 0);
        let p = params(1.0, 8).with_repetition(3).unwrap();
        let recs = transmit(1.25, 4, &p, ChannelModel::Noiseless, &mut rng);
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.measured_phase == 1.25 && r.pulse_index == 4));
    }

    #[test]
    fn receiver_and_eavesdropper_share_noise_at_unit_transmittance() {
        let mut rng = derived_rng(3, 0);
        let obs = observe(0.5, 0, &params(10.0, 4), ChannelModel::ShotNoise, &mut rng);
        assert_eq!(obs.receiver, obs.eavesdropper);
    }

    #[test]
    fn keyed_replay_alignment() {
        let rec = MeasurementRecord {
            true_phase: 0.0,
            measured_phase: 0.0,
            pulse_index: 0,
            repetition_index: 0,
        };
        assert!(eve_keyed_replay(&[rec, rec], 1, &[0], 4).is_err());
        assert!(eve_keyed_replay(&[], 1, &[], 4).unwrap().is_empty());
        assert_eq!(eve_keyed_replay(&[rec, rec], 2, &[0], 4).unwrap().as_slice(), &[0]);
    }

    #[test]
    fn strategy_ids_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.id().parse::<Strategy>().unwrap(), s);
        }
        assert!("psychic".parse::<Strategy>().is_err());
    }

    #[test]
    fn too_few_trials_rejected() {
        assert!(monte_carlo_ber(Strategy::Nearest, &params(1.0, 4), ChannelModel::ShotNoise, 999, 0).is_err());
    }

    #[test]
    fn chunking_covers_all_trials() {
        for trials in [1000u64, MC_CHUNK, MC_CHUNK + 1, 5 * MC_CHUNK - 3] {
            let total: u64 = (0..chunk_count(trials)).map(|c| chunk_len(trials, c)).sum();
            assert_eq!(total, trials);
        }
    }

    #[test]
    fn circular_mean_wraps() {
        let rec = |phi: f64| MeasurementRecord {
            true_phase: 0.0,
            measured_phase: phi,
            pulse_index: 0,
            repetition_index: 0,
        };
        let mean = mean_phase(&[rec(0.1), rec(2.0 * PI - 0.1)]);
        assert!(circular_distance(mean, 0.0) < 1e-12);
    }
}

//! Chained key-exchange protocol.
//!
//! Stations A and B start from a shared key `K₀` of `L₀` bits. In every cycle
//! the sender draws `L₀` fresh bits, ciphers them on the wheel with bases
//! taken from the current running key (`K_M` key bits per basis, one basis per
//! `K_M`-bit block), and the receiver demodulates with its own copy of the
//! key. Both then adopt the fresh sequence as the next running key and the
//! roles swap.

pub mod distill;
pub mod lfsr;

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;

use crate::bits::BitSequence;
use crate::channel::{mean_phase, observe, ChannelModel, MeasurementRecord};
use crate::error::{config, domain, Result};
use crate::mry::{circular_distance, cipher_phase, reduce_angle, SystemParams};
use crate::rng::{derived_rng, PhysicalRandom, SeededPhrg};

pub use distill::{privacy_amplify, reconcile_and_verify, MismatchReport, Verification};
pub use lfsr::{lfsr_expand, LfsrSpec};

/// Big-endian value of a `K_M`-bit key block.
pub fn key_block_to_basis(block: &[u8], key_bits: u32) -> Result<u32> {
    if block.len() != key_bits as usize {
        return Err(domain(alloc::format!(
            "key block has {} bits, expected {key_bits}",
            block.len()
        )));
    }
    if key_bits > 31 {
        return Err(domain("key blocks wider than 31 bits are not supported"));
    }
    Ok(block.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1)))
}

/// Transmitted phase `(bπ + φ_k) mod 2π`.
pub fn modulate(bit: u8, k: u32, num_bases: u32) -> Result<f64> {
    if bit > 1 {
        return Err(domain(alloc::format!("bit must be 0 or 1, got {bit}")));
    }
    let phi_k = cipher_phase(k, num_bases)?.phase;
    Ok(reduce_angle(phi_k + f64::from(bit) * PI))
}

/// Removes `φ_k` and returns the nearer of bit 0 (phase 0) and bit 1
/// (phase π). Exact ties decode as 0.
pub fn demodulate(measured_phase: f64, k: u32, num_bases: u32) -> Result<u8> {
    let phi_k = cipher_phase(k, num_bases)?.phase;
    let offset = measured_phase - phi_k;
    let to_zero = circular_distance(offset, 0.0);
    let to_pi = circular_distance(offset, PI);
    Ok(u8::from(to_pi < to_zero))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    A,
    B,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::A => Role::B,
            Role::B => Role::A,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Role::A => "A",
            Role::B => "B",
        }
    }
}

/// How running-key bits select bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CipherMode {
    /// One basis per `K_M`-bit block of fresh bits.
    #[default]
    Block,
    /// Each key block seeds an LFSR whose successive states cipher the bits of
    /// the matching fresh block one by one. An all-zero key block leaves the
    /// register stuck at zero, i.e. basis 0 for the whole block, exactly as in
    /// block mode.
    Lfsr,
}

/// One station's protocol state.
#[derive(Debug, Clone)]
pub struct StationState<G = SeededPhrg> {
    role: Role,
    running_key: BitSequence,
    source: G,
    cycle_index: u64,
}

impl StationState<SeededPhrg> {
    pub fn seeded(role: Role, starting_key: BitSequence, seed: u64) -> Self {
        Self::new(role, starting_key, SeededPhrg::new(seed))
    }
}

impl<G: PhysicalRandom> StationState<G> {
    pub fn new(role: Role, starting_key: BitSequence, source: G) -> Self {
        Self {
            role,
            running_key: starting_key,
            source,
            cycle_index: 0,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn running_key(&self) -> &BitSequence {
        &self.running_key
    }

    pub fn cycle_index(&self) -> u64 {
        self.cycle_index
    }
}

/// Bases selected by a running key. Block mode yields `L₀/K_M` bases, LFSR
/// mode one per bit.
pub fn cycle_bases(key: &BitSequence, params: &SystemParams, mode: CipherMode) -> Result<Vec<u32>> {
    let key_bits = check_protocol_params(key.len(), params, mode)?;
    let blocks = key.as_slice().chunks(key_bits as usize);
    match mode {
        CipherMode::Block => blocks.map(|b| key_block_to_basis(b, key_bits)).collect(),
        CipherMode::Lfsr => {
            let mut bases = Vec::with_capacity(key.len());
            for block in blocks {
                let seed = BitSequence::new(block.to_vec())?;
                match LfsrSpec::primitive(&seed) {
                    Ok(spec) => bases.extend(lfsr_expand(&spec, key_bits as usize)),
                    Err(crate::Error::DegenerateSeed) => {
                        bases.extend(core::iter::repeat_n(0, key_bits as usize))
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(bases)
        }
    }
}

/// Checks the protocol preconditions and returns `K_M`.
fn check_protocol_params(key_len: usize, params: &SystemParams, mode: CipherMode) -> Result<u32> {
    let m = params.num_bases();
    if m < 2 || !m.is_power_of_two() {
        return Err(config(alloc::format!(
            "protocol needs M to be a power of two >= 2, got {m}"
        )));
    }
    let key_bits = params.key_bits_per_basis();
    if key_len == 0 || !key_len.is_multiple_of(key_bits as usize) {
        return Err(config(alloc::format!(
            "sequence length L0 = {key_len} is not a positive multiple of K_M = {key_bits}"
        )));
    }
    if mode == CipherMode::Lfsr && !(lfsr::MIN_WIDTH..=lfsr::MAX_WIDTH).contains(&key_bits) {
        return Err(config(alloc::format!(
            "LFSR mode needs K_M in {}..={}, got {key_bits}",
            lfsr::MIN_WIDTH,
            lfsr::MAX_WIDTH
        )));
    }
    Ok(key_bits)
}

/// Everything that happened in one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle_index: u64,
    pub sender: Role,
    /// Fresh bits drawn by the sender.
    pub plain_bits: BitSequence,
    /// Bases the sender used.
    pub bases_used: Vec<u32>,
    /// Receiver's records, `r` per bit.
    pub pulses: Vec<MeasurementRecord>,
    /// Records of an eavesdropper tapping at the source, `r` per bit.
    pub eavesdropper_pulses: Vec<MeasurementRecord>,
    pub receiver_bits: BitSequence,
    pub receiver_ber: f64,
    /// Running-key bits turned into bases this cycle.
    pub key_bits_consumed: usize,
}

impl CycleRecord {
    /// The receiver's decoded bits differ from what was sent.
    pub fn diverged(&self) -> bool {
        self.receiver_bits != self.plain_bits
    }
}

/// One cycle: `sender` transmits a fresh sequence to `receiver`.
pub fn run_cycle<G: PhysicalRandom, R: Rng + ?Sized>(
    sender: &mut StationState<G>,
    receiver: &mut StationState<G>,
    params: &SystemParams,
    channel: ChannelModel,
    mode: CipherMode,
    noise: &mut R,
) -> Result<CycleRecord> {
    let len = sender.running_key.len();
    if receiver.running_key.len() != len {
        return Err(config(alloc::format!(
            "running keys differ in length: {len} vs {}",
            receiver.running_key.len()
        )));
    }
    let key_bits = check_protocol_params(len, params, mode)? as usize;
    let m = params.num_bases();
    let per_bit = |bases: &[u32], j: usize| match mode {
        CipherMode::Block => bases[j / key_bits],
        CipherMode::Lfsr => bases[j],
    };

    let sender_bases = cycle_bases(&sender.running_key, params, mode)?;
    let receiver_bases = cycle_bases(&receiver.running_key, params, mode)?;
    let plain_bits = sender.source.fill_bits(len);

    let r = params.repetition() as usize;
    let mut pulses = Vec::with_capacity(len * r);
    let mut eavesdropper_pulses = Vec::with_capacity(len * r);
    let mut decoded = Vec::with_capacity(len);
    for (j, bit) in plain_bits.iter().enumerate() {
        let phase = modulate(bit, per_bit(&sender_bases, j), m)?;
        let obs = observe(phase, j as u64, params, channel, noise);
        decoded.push(demodulate(mean_phase(&obs.receiver), per_bit(&receiver_bases, j), m)?);
        pulses.extend(obs.receiver);
        eavesdropper_pulses.extend(obs.eavesdropper);
    }
    let receiver_bits = BitSequence::new(decoded)?;
    let receiver_ber = plain_bits.hamming_distance(&receiver_bits)? as f64 / len as f64;

    let record = CycleRecord {
        cycle_index: sender.cycle_index,
        sender: sender.role,
        plain_bits: plain_bits.clone(),
        bases_used: sender_bases,
        pulses,
        eavesdropper_pulses,
        receiver_bits: receiver_bits.clone(),
        receiver_ber,
        key_bits_consumed: len,
    };
    sender.running_key = plain_bits;
    receiver.running_key = receiver_bits;
    sender.cycle_index += 1;
    receiver.cycle_index += 1;
    Ok(record)
}

/// Seeds of a simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationSeeds {
    pub station_a: u64,
    pub station_b: u64,
    /// Channel noise; cycle `i` uses stream `i`.
    pub channel: u64,
    /// Public seed of the per-cycle verification hashes.
    pub hash: u64,
}

impl SimulationSeeds {
    /// Distinct seeds derived from one master value.
    pub fn from_master(seed: u64) -> Self {
        let mix = |i: u64| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i.wrapping_mul(0xBF58_476D_1CE4_E5B9));
        Self {
            station_a: mix(1),
            station_b: mix(2),
            channel: mix(3),
            hash: mix(4),
        }
    }
}

/// Fixed settings of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    pub params: SystemParams,
    pub channel: ChannelModel,
    pub mode: CipherMode,
    /// Digest bits compared after every cycle; 0 disables verification.
    pub verify_bits: usize,
}

impl ProtocolConfig {
    pub fn new(params: SystemParams) -> Self {
        Self {
            params,
            channel: ChannelModel::ShotNoise,
            mode: CipherMode::Block,
            verify_bits: 64,
        }
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbortInfo {
    pub cycle_index: u64,
    pub report: MismatchReport,
}

/// Result of a protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub records: Vec<CycleRecord>,
    pub final_key_a: BitSequence,
    pub final_key_b: BitSequence,
    /// Set when a cycle's verification failed; the run stopped there.
    pub abort: Option<AbortInfo>,
}

impl Transcript {
    /// First cycle whose receiver decoded something other than what was sent.
    pub fn diverged_at(&self) -> Option<u64> {
        self.records.iter().find(|r| r.diverged()).map(|r| r.cycle_index)
    }

    pub fn keys_agree(&self) -> bool {
        self.final_key_a == self.final_key_b
    }
}

/// The two stations plus the run settings; advances one cycle at a time.
/// Cloning a seeded session checkpoints it: a clone re-runs the next cycle
/// identically.
#[derive(Debug, Clone)]
pub struct ProtocolSession<G = SeededPhrg> {
    a: StationState<G>,
    b: StationState<G>,
    config: ProtocolConfig,
    seeds: SimulationSeeds,
    next_cycle: u64,
}

impl ProtocolSession<SeededPhrg> {
    pub fn new(starting_key: BitSequence, config: ProtocolConfig, seeds: SimulationSeeds) -> Result<Self> {
        Self::with_sources(
            starting_key,
            config,
            seeds,
            SeededPhrg::new(seeds.station_a),
            SeededPhrg::new(seeds.station_b),
        )
    }
}

impl<G: PhysicalRandom> ProtocolSession<G> {
    /// Session whose stations draw fresh bits from the given sources; the
    /// station seeds in `seeds` are then unused.
    pub fn with_sources(
        starting_key: BitSequence,
        config: ProtocolConfig,
        seeds: SimulationSeeds,
        source_a: G,
        source_b: G,
    ) -> Result<Self> {
        check_protocol_params(starting_key.len(), &config.params, config.mode)?;
        Ok(Self {
            a: StationState::new(Role::A, starting_key.clone(), source_a),
            b: StationState::new(Role::B, starting_key, source_b),
            config,
            seeds,
            next_cycle: 0,
        })
    }

    pub fn station(&self, role: Role) -> &StationState<G> {
        match role {
            Role::A => &self.a,
            Role::B => &self.b,
        }
    }

    pub fn next_cycle(&self) -> u64 {
        self.next_cycle
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    /// Runs the next cycle; A sends on even cycles, B on odd ones. Returns the
    /// record and the verification outcome (if enabled).
    pub fn step(&mut self) -> Result<(CycleRecord, Option<Verification>)> {
        let cycle = self.next_cycle;
        let mut noise = derived_rng(self.seeds.channel, cycle);
        let (sender, receiver) = if cycle.is_multiple_of(2) {
            (&mut self.a, &mut self.b)
        } else {
            (&mut self.b, &mut self.a)
        };
        let record = run_cycle(
            sender,
            receiver,
            &self.config.params,
            self.config.channel,
            self.config.mode,
            &mut noise,
        )?;
        self.next_cycle += 1;
        let verification = if self.config.verify_bits > 0 {
            Some(reconcile_and_verify(
                &record.plain_bits,
                &record.receiver_bits,
                self.config.verify_bits,
                self.seeds.hash.wrapping_add(cycle),
            )?)
        } else {
            None
        };
        Ok((record, verification))
    }

    /// Runs up to `cycles` more cycles, stopping at the first failed
    /// verification.
    pub fn run(mut self, cycles: u64) -> Result<Transcript> {
        if cycles == 0 {
            return Err(domain("at least one cycle is required"));
        }
        let mut records = Vec::with_capacity(cycles as usize);
        let mut abort = None;
        for _ in 0..cycles {
            let (record, verification) = self.step()?;
            let cycle_index = record.cycle_index;
            records.push(record);
            if let Some(Verification::Abort(report)) = verification {
                abort = Some(AbortInfo { cycle_index, report });
                break;
            }
        }
        Ok(Transcript {
            records,
            final_key_a: self.a.running_key,
            final_key_b: self.b.running_key,
            abort,
        })
    }
}

/// Runs `cycles` cycles from the shared starting key.
pub fn run_protocol(
    cycles: u64,
    starting_key: BitSequence,
    config: ProtocolConfig,
    seeds: SimulationSeeds,
) -> Result<Transcript> {
    if cycles == 0 {
        return Err(domain("at least one cycle is required"));
    }
    ProtocolSession::new(starting_key, config, seeds)?.run(cycles)
}

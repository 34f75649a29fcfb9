//! Eavesdropper statistics over a protocol transcript.

use mesokey_core::channel::{BerEstimate, Strategy};
use mesokey_core::protocol::{CipherMode, Transcript};
use mesokey_core::SystemParams;

use crate::error::CliResult;

/// Per-strategy Eve BER on the pulses a source-side tap recorded during the
/// run. The keyed strategy replays the records with the sender's bases, i.e.
/// as if the key had been revealed afterwards.
pub fn eavesdropper_ber(
    transcript: &Transcript,
    params: &SystemParams,
    mode: CipherMode,
    strategy: Strategy,
) -> CliResult<BerEstimate> {
    let r = params.repetition() as usize;
    let key_bits = params.key_bits_per_basis().max(1) as usize;
    let (mut errors, mut trials) = (0u64, 0u64);
    for record in &transcript.records {
        for (j, (chunk, bit)) in record
            .eavesdropper_pulses
            .chunks(r)
            .zip(record.plain_bits.iter())
            .enumerate()
        {
            let basis = match mode {
                CipherMode::Block => record.bases_used[j / key_bits],
                CipherMode::Lfsr => record.bases_used[j],
            };
            if strategy.decide(chunk, basis, params)? != bit {
                errors += 1;
            }
            trials += 1;
        }
    }
    Ok(BerEstimate::from_counts(errors, trials))
}

/// Receiver BER pooled over all cycles.
pub fn receiver_ber(transcript: &Transcript) -> BerEstimate {
    let (errors, trials) = transcript.records.iter().fold((0u64, 0u64), |(e, t), r| {
        let wrong = r.plain_bits.hamming_distance(&r.receiver_bits).unwrap_or(0) as u64;
        (e + wrong, t + r.plain_bits.len() as u64)
    });
    BerEstimate::from_counts(errors, trials)
}

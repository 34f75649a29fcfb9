//! Line-delimited JSON transcripts, one object per cycle.

use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use mesokey_core::bits::BitSequence;
use mesokey_core::protocol::{CycleRecord, Transcript};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// One cycle as written to disk. Bit payloads are packed most significant
/// bit first and base-64 encoded; `bits` gives their length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub cycle: u64,
    pub sender: String,
    pub ber: f64,
    pub bits: usize,
    pub plain: String,
    pub received: String,
    pub bases: Vec<u32>,
    pub diverged: bool,
    /// Verification failed on this cycle and the run stopped.
    pub aborted: bool,
}

impl TranscriptLine {
    pub fn from_record(record: &CycleRecord, aborted: bool) -> Self {
        Self {
            cycle: record.cycle_index,
            sender: record.sender.label().to_string(),
            ber: record.receiver_ber,
            bits: record.plain_bits.len(),
            plain: STANDARD.encode(record.plain_bits.to_bytes_msb()),
            received: STANDARD.encode(record.receiver_bits.to_bytes_msb()),
            bases: record.bases_used.clone(),
            diverged: record.diverged(),
            aborted,
        }
    }

    pub fn plain_bits(&self) -> CliResult<BitSequence> {
        decode_bits(&self.plain, self.bits)
    }

    pub fn received_bits(&self) -> CliResult<BitSequence> {
        decode_bits(&self.received, self.bits)
    }
}

fn decode_bits(payload: &str, len: usize) -> CliResult<BitSequence> {
    let bytes = STANDARD
        .decode(payload)
        .map_err(|e| CliError::validation(format!("bad base-64 payload: {e}")))?;
    Ok(BitSequence::from_bytes_msb(&bytes, len)?)
}

pub fn transcript_lines(transcript: &Transcript) -> Vec<TranscriptLine> {
    let aborted_at = transcript.abort.as_ref().map(|a| a.cycle_index);
    transcript
        .records
        .iter()
        .map(|r| TranscriptLine::from_record(r, aborted_at == Some(r.cycle_index)))
        .collect()
}

pub fn write_jsonl<W: Write>(mut out: W, lines: &[TranscriptLine]) -> CliResult<()> {
    for line in lines {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> CliResult<Vec<TranscriptLine>> {
    let mut lines = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        lines.push(
            serde_json::from_str(&line)
                .map_err(|e| CliError::validation(format!("transcript line {}: {e}", i + 1)))?,
        );
    }
    Ok(lines)
}

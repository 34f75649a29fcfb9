//! Hex key text: `[<bits>:]<hex digits>`, most significant bit first.
//!
//! Without the length prefix the key is `4 ×` the digit count long.

use std::path::Path;

use mesokey_core::bits::BitSequence;

use crate::error::{CliError, CliResult};

pub fn parse_key(text: &str) -> CliResult<BitSequence> {
    let text: String = text.split_whitespace().collect();
    let (len, digits) = match text.split_once(':') {
        Some((len, digits)) => {
            let len: usize = len
                .parse()
                .map_err(|_| CliError::validation(format!("bad key length prefix '{len}'")))?;
            (Some(len), digits)
        }
        None => (None, text.as_str()),
    };
    let digits = digits.strip_prefix("0x").unwrap_or(digits);
    // pad to whole bytes; the padding nibble sits past the last used bit
    let padded = if digits.len() % 2 == 1 { format!("{digits}0") } else { digits.to_string() };
    let bytes = hex::decode(&padded).map_err(|e| CliError::validation(format!("bad hex key: {e}")))?;
    let len = len.unwrap_or(digits.len() * 4);
    if len > digits.len() * 4 {
        return Err(CliError::validation(format!(
            "key claims {len} bits but carries only {}",
            digits.len() * 4
        )));
    }
    Ok(BitSequence::from_bytes_msb(&bytes, len)?)
}

pub fn format_key(key: &BitSequence) -> String {
    let digits = hex::encode(key.to_bytes_msb());
    let used = key.len().div_ceil(4);
    format!("{}:{}", key.len(), &digits[..used])
}

pub fn read_key(path: &Path) -> CliResult<BitSequence> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read key {}: {e}", path.display())))?;
    parse_key(&text)
}

pub fn write_key(path: &Path, key: &BitSequence) -> CliResult<()> {
    std::fs::write(path, format!("{}\n", format_key(key)))
        .map_err(|e| CliError::Io(format!("cannot write key {}: {e}", path.display())))
}

/// 64-bit seed written in hex, optionally `0x`-prefixed.
pub fn parse_seed(text: &str) -> CliResult<u64> {
    let t = text.trim();
    let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u64::from_str_radix(t, 16).map_err(|_| CliError::validation(format!("seed '{text}' is not a 64-bit hex value")))
}

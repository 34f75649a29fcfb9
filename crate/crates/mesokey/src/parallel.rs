//! Rayon drivers. Results are identical to the sequential core functions:
//! every work item is computed independently and gathered in order.

use mesokey_core::channel::{chunk_count, chunk_len, monte_carlo_chunk, pool_chunks, BerEstimate, ChannelModel, Strategy, MIN_TRIALS};
use mesokey_core::helstrom::PePoint;
use mesokey_core::SystemParams;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

pub fn pe_curve(num_bases: &[u32], n: f64) -> CliResult<Vec<PePoint>> {
    num_bases
        .par_iter()
        .map(|&m| PePoint::compute(m, n).map_err(CliError::from))
        .collect()
}

pub fn monte_carlo_ber(
    strategy: Strategy,
    params: &SystemParams,
    channel: ChannelModel,
    trials: u64,
    seed: u64,
) -> CliResult<BerEstimate> {
    if trials < MIN_TRIALS {
        return Err(CliError::validation(format!(
            "Monte Carlo needs at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let errors = (0..chunk_count(trials))
        .into_par_iter()
        .map(|c| monte_carlo_chunk(strategy, params, channel, seed, c, chunk_len(trials, c)))
        .collect::<Result<Vec<u64>, _>>()?;
    Ok(pool_chunks(trials, errors))
}

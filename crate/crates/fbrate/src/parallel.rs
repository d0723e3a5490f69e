//! Monte-Carlo chunks on the rayon pool.
//!
//! Chunks are merged in index order, so estimates are bit-identical to the
//! sequential routines of `fbrate_core::mc` for any number of threads.

use fbrate_core::mc::{
    check_exponent, discount, run_chunk, ChunkStats, McConfig, McEstimate, SnrSampler,
};
use fbrate_core::{ChannelParams, Result};
use rayon::prelude::*;

pub fn estimate_mean<F>(params: &ChannelParams, config: &McConfig, f: F) -> Result<ChunkStats>
where
    F: Fn(f64) -> f64 + Sync,
{
    config.validate()?;
    let sampler = SnrSampler::new(params)?;
    let chunks: Vec<(u64, u64)> = config.chunks().collect();
    let stats: Vec<ChunkStats> = chunks
        .par_iter()
        .map(|&(k, len)| run_chunk(&sampler, config.seed, k, len, &f))
        .collect();
    Ok(stats
        .into_iter()
        .fold(ChunkStats::default(), ChunkStats::merge))
}

pub fn estimate_er(params: &ChannelParams, a: f64, config: &McConfig) -> Result<McEstimate> {
    check_exponent(a)?;
    let stats = estimate_mean(params, config, |g| discount(g, a))?;
    Ok(McEstimate::from_stats(stats, a, config.seed))
}

//! Multi-threaded verification with the same answers as the sequential
//! sweep: blocks and sample chunks are searched in parallel and the
//! earliest counterexample wins.

use std::sync::OnceLock;

use hatguess_core::game::{exhaustive_total, sample_chunk, sweep_block, SAMPLE_CHUNK};
use hatguess_core::{Graph, Result, StrategyProfile, VerifyMode, VerifyOutcome};
use rayon::prelude::*;

/// `HG_THREADS` when set to a positive number, else the machine's
/// parallelism.
pub fn thread_count() -> usize {
    std::env::var("HG_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Sizes the global pool once; later calls are no-ops.
pub fn init_pool() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        // fails only if some other code already built the global pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(thread_count())
            .build_global();
    });
}

const MIN_BLOCK: u64 = 1 << 12;

pub fn verify_parallel(
    graph: &Graph,
    profile: &StrategyProfile,
    mode: VerifyMode,
    budget: u64,
) -> Result<VerifyOutcome> {
    init_pool();
    profile.validate_for(graph)?;
    match mode {
        VerifyMode::Exhaustive => {
            let total = exhaustive_total(graph.n(), profile.q(), budget)?;
            let block = (total / (rayon::current_num_threads() as u64 * 16)).max(MIN_BLOCK);
            let blocks = total.div_ceil(block);
            let first = (0..blocks).into_par_iter().find_map_first(|b| {
                let start = b * block;
                sweep_block(graph, profile, start, block.min(total - start)).transpose()
            });
            match first.transpose()? {
                Some(c) => Ok(VerifyOutcome::Counterexample(c)),
                None => Ok(VerifyOutcome::Winning),
            }
        }
        VerifyMode::Sampled { count, seed } => {
            let chunks = count.div_ceil(SAMPLE_CHUNK);
            let first = (0..chunks).into_par_iter().find_map_first(|c| {
                let len = SAMPLE_CHUNK.min(count - c * SAMPLE_CHUNK);
                sample_chunk(graph, profile, seed, c, len).transpose()
            });
            match first.transpose()? {
                Some((_, c)) => Ok(VerifyOutcome::Counterexample(c)),
                None => Ok(VerifyOutcome::NoCounterexampleFound { samples: count }),
            }
        }
    }
}

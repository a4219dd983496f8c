//! Many independent episodes at once.
//!
//! Episodes share nothing, so the parallel path is a plain indexed map and
//! results come back in input order regardless of scheduling. Without the
//! `parallel` feature every batch runs sequentially.

use super::episode::{run_episode, RunLog};
use super::{HarnessError, ScenarioConfig};

pub type EpisodeResult = Result<RunLog, HarnessError>;

pub fn batch_sequential(configs: &[ScenarioConfig]) -> Vec<EpisodeResult> {
    configs.iter().map(run_episode).collect()
}

#[cfg(feature = "parallel")]
pub fn batch_parallel(
    configs: &[ScenarioConfig],
    parallelism: usize,
) -> Result<Vec<EpisodeResult>, HarnessError> {
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| configs.par_iter().map(run_episode).collect()))
}

/// Runs every config; a failing episode never affects its siblings.
pub fn batch(
    configs: &[ScenarioConfig],
    parallelism: usize,
) -> Result<Vec<EpisodeResult>, HarnessError> {
    if parallelism == 0 {
        return Err(HarnessError::InvalidParallelism);
    }
    #[cfg(feature = "parallel")]
    if parallelism > 1 {
        return batch_parallel(configs, parallelism);
    }
    Ok(batch_sequential(configs))
}

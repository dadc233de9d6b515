use rayon::prelude::*;

use super::HarnessError;
use crate::error::{Error, Result};
use crate::rng::mix;

/// Outcome of replica `index`, which ran with seed `mix(master, index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome<T> {
    pub index: u64,
    pub seed: u64,
    pub result: Result<T>,
}

/// Runs `task(index, seed)` for every replica on `min(threads, replicas)`
/// workers and returns outcomes sorted by index. Fails only when every
/// replica failed, carrying the first failure.
pub fn replicate<T, F>(task: F, replicas: u64, master_seed: u64, threads: usize) -> Result<Vec<ReplicaOutcome<T>>, HarnessError>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
{
    if replicas == 0 {
        return Err(HarnessError::Config("replicas must be at least 1".into()));
    }
    let workers = (threads.max(1) as u64).min(replicas) as usize;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Runtime(Error::Capacity(format!("cannot start {workers} worker threads: {e}"))))?;
    let outcomes: Vec<ReplicaOutcome<T>> = pool.install(|| {
        (0..replicas)
            .into_par_iter()
            .map(|index| {
                let seed = mix(master_seed, index);
                ReplicaOutcome { index, seed, result: task(index, seed) }
            })
            .collect()
    });
    if let Some(first) = outcomes.iter().find_map(|o| o.result.as_ref().err()) {
        if outcomes.iter().all(|o| o.result.is_err()) {
            return Err(HarnessError::Runtime(first.clone()));
        }
    }
    Ok(outcomes)
}

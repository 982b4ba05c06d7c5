//! Batches of annealing runs spread over a thread pool.

use rayon::prelude::*;
use slotting_core::annealer::{
    batch_seed, run_sa, BatchError, BatchReport, BatchStats, Clock, Problem, RunResult, SaConfig,
};
use slotting_core::Error as CoreError;

/// Same contract as [`slotting_core::annealer::run_batch`]; runs execute on
/// `pool` and come back in seed order.
pub fn run_batch_parallel<C: Clock + Sync>(
    problem: Problem<'_>,
    config: &SaConfig,
    n_runs: usize,
    base_seed: u64,
    clock: &C,
    pool: &rayon::ThreadPool,
) -> Result<BatchReport, BatchError> {
    if n_runs == 0 {
        return Err(BatchError {
            failed_run: 0,
            completed: Vec::new(),
            error: CoreError::InvalidArgument("a batch needs at least one run".into()),
        });
    }
    let results: Vec<Result<RunResult, CoreError>> = pool.install(|| {
        (0..n_runs)
            .into_par_iter()
            .map(|r| {
                let run_config = SaConfig {
                    seed: batch_seed(base_seed, r),
                    ..config.clone()
                };
                run_sa(problem, &run_config, clock)
            })
            .collect()
    });
    let mut runs = Vec::with_capacity(n_runs);
    for (r, result) in results.into_iter().enumerate() {
        match result {
            Ok(run) => runs.push(run),
            Err(error) => {
                return Err(BatchError {
                    failed_run: r,
                    completed: runs,
                    error,
                })
            }
        }
    }
    let stats = BatchStats::from_runs(&runs).expect("at least one run");
    Ok(BatchReport { runs, stats })
}

pub fn thread_pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool construction")
}

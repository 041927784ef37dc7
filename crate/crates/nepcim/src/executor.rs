//! A scoped-thread executor with static contiguous chunking.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::thread;

use nepcim_core::parallel::chunk_ranges;
use nepcim_core::{Error, Executor, Result};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "NEPCIM_WORKERS";

/// Splits each batch into `workers` contiguous chunks and runs every
/// chunk on its own scoped thread. Results come back in input order.
#[derive(Debug, Clone, Copy)]
pub struct ThreadPool {
    workers: usize,
}

impl ThreadPool {
    pub fn new(workers: usize) -> Self {
        ThreadPool { workers: workers.max(1) }
    }

    /// Worker count from [`WORKERS_ENV`], else the available parallelism.
    pub fn from_env() -> Self {
        Self::new(default_workers())
    }
}

pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn run_guarded<T, R, F>(f: &F, index: usize, item: &T) -> Result<R>
where
    F: Fn(usize, &T) -> Result<R>,
{
    catch_unwind(AssertUnwindSafe(|| f(index, item))).unwrap_or(Err(Error::TaskPanicked { index }))
}

impl Executor for ThreadPool {
    fn workers(&self) -> usize {
        self.workers
    }

    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<Result<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> Result<R> + Sync,
    {
        let chunks = chunk_ranges(items.len(), self.workers);
        if chunks.len() <= 1 {
            return items.iter().enumerate().map(|(i, x)| run_guarded(&f, i, x)).collect();
        }
        let f = &f;
        thread::scope(|s| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|range| s.spawn(move || range.map(|i| run_guarded(f, i, &items[i])).collect::<Vec<_>>()))
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("worker panics are caught per item")).collect()
        })
    }
}

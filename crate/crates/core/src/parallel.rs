//! Deterministic parallel map.
//!
//! Drivers hand each batch of independent items (disks, candidates,
//! quadrature nodes) to an [`Executor`]. Results always come back in input
//! order, so the output of a batch does not depend on how many workers
//! processed it.

use alloc::vec::Vec;
use core::ops::Range;

use crate::error::Result;

/// Runs a pure function over a slice of items.
pub trait Executor: Sync {
    fn workers(&self) -> usize;

    /// Applies `f(index, item)` to every item and returns the results in
    /// input order. A failing item occupies its own slot; the other items
    /// still run.
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<Result<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> Result<R> + Sync;
}

/// Runs everything on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn workers(&self) -> usize {
        1
    }

    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<Result<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> Result<R> + Sync,
    {
        items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
    }
}

impl<E: Executor + ?Sized> Executor for &E {
    fn workers(&self) -> usize {
        (**self).workers()
    }

    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<Result<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> Result<R> + Sync,
    {
        (**self).map(items, f)
    }
}

/// An ordered batch of work items and the worker count to spread them over.
#[derive(Debug, Clone, Copy)]
pub struct TaskBatch<'a, T> {
    pub items: &'a [T],
    pub workers: usize,
}

impl<'a, T> TaskBatch<'a, T> {
    pub fn new(items: &'a [T], workers: usize) -> Self {
        TaskBatch { items, workers: workers.max(1) }
    }

    /// Contiguous index ranges, one per worker that has work.
    pub fn chunks(&self) -> Vec<Range<usize>> {
        chunk_ranges(self.items.len(), self.workers)
    }
}

/// Splits `0..len` into at most `workers` contiguous ranges whose lengths
/// differ by at most one. Earlier ranges are the longer ones.
pub fn chunk_ranges(len: usize, workers: usize) -> Vec<Range<usize>> {
    let workers = workers.max(1).min(len.max(1));
    let base = len / workers;
    let extra = len % workers;
    let mut out = Vec::with_capacity(workers);
    let mut start = 0;
    for w in 0..workers {
        let size = base + usize::from(w < extra);
        if size == 0 {
            continue;
        }
        out.push(start..start + size);
        start += size;
    }
    out
}

/// Convenience wrapper around [`Executor::map`].
pub fn parallel_map<E, T, R, F>(executor: &E, items: &[T], f: F) -> Vec<Result<R>>
where
    E: Executor + ?Sized,
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync,
{
    executor.map(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use alloc::vec;

    #[test]
    fn sequential_map_keeps_order() {
        let out = parallel_map(&Sequential, &[1, 2, 3], |_, x| Ok(x * x));
        assert_eq!(out, vec![Ok(1), Ok(4), Ok(9)]);
        let empty: Vec<Result<i32>> = parallel_map(&Sequential, &[] as &[i32], |_, x| Ok(*x));
        assert!(empty.is_empty());
    }

    #[test]
    fn failures_stay_in_their_slot() {
        let out =
            parallel_map(&Sequential, &[1, 2, 3], |i, x| if i == 1 { Err(Error::numerical("boom")) } else { Ok(*x) });
        assert!(out[0].is_ok() && out[1].is_err() && out[2].is_ok());
    }

    #[test]
    fn chunking_covers_everything() {
        for len in 0..40 {
            for workers in 1..10 {
                let chunks = chunk_ranges(len, workers);
                assert!(chunks.len() <= workers);
                let mut next = 0;
                for r in &chunks {
                    assert_eq!(r.start, next);
                    assert!(!r.is_empty());
                    next = r.end;
                }
                assert_eq!(next, len);
            }
        }
        assert_eq!(chunk_ranges(10, 3), vec![0..4, 4..7, 7..10]);
        assert_eq!(TaskBatch::new(&[0u8; 5], 0).chunks(), vec![0..5]);
    }
}

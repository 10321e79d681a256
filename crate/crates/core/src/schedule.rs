//! Dynamic chunked scheduling over a private worker pool.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::LouvainError;

pub(crate) struct Executor {
    pool: ThreadPool,
    threads: usize,
    chunk: usize,
}

impl Executor {
    pub fn new(threads: usize, chunk: usize) -> Result<Self, LouvainError> {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .thread_name(|i| format!("louvain-{i}"))
            .build()
            .map_err(|e| LouvainError::InvalidParams(format!("thread pool: {e}")))?;
        Ok(Self {
            pool,
            threads,
            chunk: chunk.max(1),
        })
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    /// Runs `f` inside the pool, so nested rayon calls use its workers.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    /// Visits `0..n` in chunks claimed from a shared cursor. Worker `t` owns
    /// `states[t]` for the whole call. Must be called from inside
    /// [`Executor::install`].
    pub fn for_each_chunk<S, F>(&self, n: usize, states: &mut [S], body: F)
    where
        S: Send,
        F: Fn(&mut S, Range<usize>) + Sync,
    {
        assert_eq!(states.len(), self.threads);
        if self.threads == 1 || n <= self.chunk {
            let s = &mut states[0];
            let mut start = 0;
            while start < n {
                let end = (start + self.chunk).min(n);
                body(s, start..end);
                start = end;
            }
            return;
        }
        let cursor = AtomicUsize::new(0);
        let (cursor, body, chunk) = (&cursor, &body, self.chunk);
        rayon::scope(|scope| {
            for s in states.iter_mut() {
                scope.spawn(move |_| loop {
                    let start = cursor.fetch_add(chunk, Ordering::Relaxed);
                    if start >= n {
                        break;
                    }
                    body(s, start..(start + chunk).min(n));
                });
            }
        });
    }
}

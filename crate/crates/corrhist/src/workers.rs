//! Bounded worker pools. Results always come back in input order, so
//! output never depends on the number of workers.

use rayon::prelude::*;
use rayon::ThreadPool;

use corrhist_core::chain::{chain_corrections, raw_groups};
use corrhist_core::extract::classify_interval;
use corrhist_core::{CorrectionCase, History, RawGroup};

pub struct Workers {
    pool: Option<ThreadPool>,
    n: usize,
}

impl Workers {
    /// `n` workers; 0 means one per available CPU. With one worker
    /// everything runs on the calling thread.
    pub fn new(n: usize) -> Self {
        let n = if n == 0 { std::thread::available_parallelism().map_or(1, |n| n.get()) } else { n };
        let pool = (n > 1).then(|| rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool"));
        Workers { pool, n }
    }

    pub fn serial() -> Self {
        Workers::new(1)
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// `f` over `items`, results in item order.
    pub fn map<T: Sync, U: Send>(&self, items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
        match &self.pool {
            None => items.iter().map(f).collect(),
            Some(p) => p.install(|| items.par_iter().map(f).collect()),
        }
    }

    /// Runs both closures, concurrently when there are workers to spare.
    pub fn join<A: Send, B: Send>(&self, a: impl FnOnce() -> A + Send, b: impl FnOnce() -> B + Send) -> (A, B) {
        match &self.pool {
            None => (a(), b()),
            Some(p) => p.install(|| rayon::join(a, b)),
        }
    }
}

/// Raw groups of every consecutive pair, classified concurrently.
pub fn raw_groups_parallel(history: &History, workers: &Workers) -> Vec<RawGroup> {
    if workers.count() == 1 {
        return raw_groups(history);
    }
    let pairs: Vec<&[corrhist_core::Snapshot]> = history.snapshots().windows(2).collect();
    workers.map(&pairs, |w| classify_interval(&w[0], &w[1])).concat()
}

/// `extract_corrections` with per-interval work spread over `workers`.
pub fn extract_parallel(history: &History, workers: &Workers) -> Result<Vec<CorrectionCase>, corrhist_core::Error> {
    if history.len() < 2 {
        return Err(corrhist_core::Error::TooFewSnapshots(2));
    }
    chain_corrections(history, &raw_groups_parallel(history, workers))
}

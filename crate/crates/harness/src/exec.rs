//! Rayon-backed [`Executor`].
//!
//! Monte Carlo indices are cut into fixed-size chunks, independent of the
//! number of threads, and the per-chunk hit counts are integers, so the
//! total never depends on scheduling. Sweep entries are collected in δ
//! order.

use oscillation_core::exec::Membership;
use oscillation_core::measure::count_hits_range;
use oscillation_core::morphology::BallMode;
use oscillation_core::seminorm::{sweep_entry, SweepEntry};
use oscillation_core::{BoundingBox, Executor, GridFunction};
use rayon::prelude::*;

/// Sample indices handled by one task.
pub const CHUNK: u64 = 1 << 14;

pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    /// `threads = None` uses every available core.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn sweep_entries(
        &self,
        g: &GridFunction,
        mode: BallMode,
        deltas: &[f64],
        alpha: f64,
        c: f64,
    ) -> oscillation_core::Result<Vec<SweepEntry>> {
        self.pool.install(|| deltas.par_iter().map(|&d| sweep_entry(g, mode, d, alpha, c)).collect())
    }

    fn count_hits(
        &self,
        membership: &Membership<'_>,
        bbox: &BoundingBox,
        n: u64,
        seed: u64,
    ) -> oscillation_core::Result<u64> {
        let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
        let counts: Vec<oscillation_core::Result<u64>> = self.pool.install(|| {
            chunks
                .par_iter()
                .map(|&k| count_hits_range(membership, bbox, seed, k * CHUNK..((k + 1) * CHUNK).min(n)))
                .collect()
        });
        // First failing chunk in index order, so errors are reproducible too.
        counts.into_iter().sum()
    }
}

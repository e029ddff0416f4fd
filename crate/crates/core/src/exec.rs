//! Execution strategy for the two embarrassingly parallel workloads: the
//! per-δ entries of a sweep and Monte Carlo hit counting.
//!
//! Implementations must return results identical to [`Sequential`]: sweep
//! entries in δ order, and hit counts as exact integer sums over the
//! addressed sample indices.

use crate::error::Result;
use crate::grid::GridFunction;
use crate::morphology::BallMode;
use crate::seminorm::{sweep_entry, SweepEntry};
use crate::sets::BoundingBox;

/// Membership oracle used for Monte Carlo. `Err(Error::OnTargetSet)` asks
/// for the sample to be redrawn.
pub type Membership<'a> = dyn Fn(&[f64]) -> Result<bool> + Sync + 'a;

pub trait Executor {
    /// One [`SweepEntry`] per δ, in the given order.
    fn sweep_entries(
        &self,
        g: &GridFunction,
        mode: BallMode,
        deltas: &[f64],
        alpha: f64,
        c: f64,
    ) -> Result<alloc::vec::Vec<SweepEntry>> {
        deltas.iter().map(|&d| sweep_entry(g, mode, d, alpha, c)).collect()
    }

    /// Hits among sample indices `0..n`.
    fn count_hits(&self, membership: &Membership<'_>, bbox: &BoundingBox, n: u64, seed: u64) -> Result<u64> {
        crate::measure::count_hits_range(membership, bbox, seed, 0..n)
    }
}

/// Single-threaded reference executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {}

//! Reproducible random streams.
//!
//! Every stream is ChaCha8 keyed by a 64-bit seed, with a 64-bit stream id
//! and a word position. A Monte Carlo sample is addressed by
//! `(seed, sample index, attempt)`: the index selects the stream and the
//! attempt selects the word offset, so any partition of the index range
//! across threads reproduces the same points.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;
use crate::sets::BoundingBox;

/// Uniform double in `[0, 1)` from the top 53 bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A sequential stream: one seed, one stream id.
#[derive(Debug, Clone)]
pub struct SplitStream {
    rng: ChaCha8Rng,
}

impl SplitStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.rng.next_u64())
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Index in `0..n` (`n > 0`), by widening multiplication.
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.rng.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Standard normal via Box–Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let (s, _) = math::sin_cos(2.0 * core::f64::consts::PI * u2);
        math::sqrt(-2.0 * libm::log(u1)) * s
    }
}

/// Random access to Monte Carlo sample points.
#[derive(Debug, Clone)]
pub struct SampleStream {
    base: ChaCha8Rng,
    seed: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self { base: ChaCha8Rng::seed_from_u64(seed), seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform point of `bbox` for `(index, attempt)`.
    pub fn point(&self, index: u64, attempt: u32, bbox: &BoundingBox, out: &mut [f64]) {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(2 * out.len() as u128 * attempt as u128);
        for (a, x) in out.iter_mut().enumerate() {
            let u = unit_f64(rng.next_u64());
            *x = bbox.min[a] + (bbox.max[a] - bbox.min[a]) * u;
        }
    }
}

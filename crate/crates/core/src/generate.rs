//! Deterministic input generators: constants, the lattice indicator, the
//! three-component example and seeded random fields.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SENTINEL};
use crate::math;
use crate::rng::SplitStream;

pub fn constant(shape: Vec<usize>, spacing: f64, origin: Vec<f64>, value: f64) -> Result<GridFunction> {
    let len = shape.iter().product();
    GridFunction::new(shape, spacing, origin, vec![value; len], None)
}

/// Indicator of `D ∩ 4rℤ` on `D = [0, L]`: cells whose centers lie within
/// `h/2` of a multiple of `4r`. Centers are `x_j = j·h`, `j = 0..=L/h`.
pub fn lattice_indicator(length: f64, r: f64, h: f64) -> Result<GridFunction> {
    if !(length > 0.0 && r > 0.0 && h > 0.0) {
        return Err(Error::param("lattice needs L, r, h > 0"));
    }
    let n = math::round(length / h) as usize + 1;
    let period = 4.0 * r;
    let values = (0..n)
        .map(|j| {
            let x = j as f64 * h;
            let off = math::abs(x - period * math::round(x / period));
            if off < 0.5 * h * (1.0 - 1e-9) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    GridFunction::new(vec![n], h, vec![0.0], values, None)
}

/// `D = [−N−1, −N+1] ∪ {0} ∪ [N−1, N+1]` with `f` the indicator of `{0}`.
///
/// `1/h` must be an integer so that every component endpoint and the
/// singleton are cell centers.
pub fn disconnected(n: u32, h: f64) -> Result<GridFunction> {
    if n < 2 {
        return Err(Error::param("the three components need N ≥ 2"));
    }
    let per_unit = 1.0 / h;
    let m = math::round(per_unit);
    if !(h > 0.0) || m < 1.0 || math::abs(per_unit - m) > 1e-9 * per_unit {
        return Err(Error::param("1/h must be a positive integer"));
    }
    let (m, n) = (m as usize, n as usize);
    let cells = 2 * (n + 1) * m + 1;
    let center = (n + 1) * m;
    let mut mask = vec![false; cells];
    let mut values = vec![SENTINEL; cells];
    for j in (0..=2 * m).chain(2 * n * m..cells) {
        mask[j] = true;
        values[j] = 0.0;
    }
    mask[center] = true;
    values[center] = 1.0;
    GridFunction::new(vec![cells], h, vec![-((n + 1) as f64)], values, Some(mask))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// Every cell.
    Box,
    /// Cells whose center lies in the largest inscribed ball.
    Ball,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    /// Independent uniform values in `[0, 1)`.
    Uniform,
    /// Sum of `modes` random cosine waves with frequencies up to `max_frequency`.
    Smooth { modes: usize, max_frequency: f64 },
}

/// Seeded random function on `[0, (n−1)h]^d`.
pub fn random_field(shape: Vec<usize>, h: f64, field: Field, domain: Domain, seed: u64) -> Result<GridFunction> {
    let dim = shape.len();
    let mut rng = SplitStream::new(seed, 0);
    let waves: Vec<(Vec<f64>, f64, f64)> = match field {
        Field::Uniform => Vec::new(),
        Field::Smooth { modes, max_frequency } => (0..modes)
            .map(|_| {
                let k = (0..dim).map(|_| rng.uniform(-max_frequency, max_frequency)).collect();
                (k, rng.uniform(0.0, 2.0 * core::f64::consts::PI), rng.uniform(0.2, 1.0))
            })
            .collect(),
    };
    let center: Vec<f64> = shape.iter().map(|&n| 0.5 * (n - 1) as f64 * h).collect();
    let radius = center.iter().copied().fold(f64::INFINITY, f64::min).max(0.5 * h);
    let mut noise = SplitStream::new(seed, 1);
    GridFunction::from_fn(shape, h, vec![0.0; dim], |x| {
        if domain == Domain::Ball && math::dist2(x, &center) > radius * radius {
            return None;
        }
        Some(match field {
            Field::Uniform => noise.next_f64(),
            Field::Smooth { .. } => waves
                .iter()
                .map(|(k, phase, amp)| {
                    let arg: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phase;
                    amp * math::sin_cos(arg).1
                })
                .sum(),
        })
    })
}

//! Ball-window supremum/infimum (dilation/erosion) and the r-oscillation.
//!
//! A window at cell `x` is the set of masked cells `x + k` whose integer
//! offset `k` lies in the ball of radius `r` at spacing `h`. Membership
//! compares the integer squared norm `s = Σ k_i²` against `τ = (r/h)²`; when
//! `|s − τ| ≤ 1e-9·max(1, τ)` the offset sits on the sphere, so it is
//! excluded from open balls and included in closed ones.
//!
//! `d = 1` runs a monotone-deque sliding extremum, `d = 2` splits the disk
//! into row intervals and reuses the 1-D kernel, higher dimensions scan the
//! stencil. [`naive`] always scans the stencil and serves as the oracle.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{unravel_into, GridFunction, SENTINEL};
use crate::math;

pub const TIE_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_STENCIL_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BallMode {
    /// `|y − x| < r`
    Open,
    /// `|y − x| ≤ r`
    Closed,
}

/// Squared scaled radius `(r/h)²`.
fn tau(r: f64, h: f64) -> f64 {
    let t = r / h;
    t * t
}

/// Whether an offset with integer squared norm `s` lies in the ball.
#[inline]
pub fn offset_inside(s: u64, tau: f64, mode: BallMode) -> bool {
    let s = s as f64;
    if math::abs(s - tau) <= TIE_TOLERANCE * tau.max(1.0) {
        mode == BallMode::Closed
    } else {
        s < tau
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::param(alloc::format!("ball radius must be positive and finite, got {r}")));
    }
    Ok(())
}

/// Integer offset stencil of a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct BallOffsets {
    pub radius: f64,
    pub spacing: f64,
    pub mode: BallMode,
    dim: usize,
    offsets: Vec<i64>,
}

impl BallOffsets {
    pub fn new(r: f64, h: f64, dim: usize, mode: BallMode) -> Result<Self> {
        Self::with_budget(r, h, dim, mode, DEFAULT_STENCIL_BUDGET)
    }

    pub fn with_budget(r: f64, h: f64, dim: usize, mode: BallMode, budget: usize) -> Result<Self> {
        check_radius(r)?;
        if !(h > 0.0) {
            return Err(Error::InvalidSpacing(h));
        }
        if dim == 0 {
            return Err(Error::param("dimension must be at least 1"));
        }
        let t = tau(r, h);
        let m = math::floor(r / h) as i64 + 1;
        let side = (2 * m + 1) as f64;
        let cube = math::powi(side, dim as i32);
        if cube > 8.0 * budget as f64 {
            return Err(Error::StencilBudget { count: cube as usize, budget });
        }
        let mut offsets = Vec::new();
        let mut k = vec![-m; dim];
        let mut count = 0usize;
        loop {
            let s: u64 = k.iter().map(|&x| (x * x) as u64).sum();
            if offset_inside(s, t, mode) {
                count += 1;
                if count > budget {
                    return Err(Error::StencilBudget { count, budget });
                }
                offsets.extend_from_slice(&k);
            }
            // odometer increment
            let mut axis = dim;
            loop {
                if axis == 0 {
                    return Ok(Self { radius: r, spacing: h, mode, dim, offsets });
                }
                axis -= 1;
                if k[axis] < m {
                    k[axis] += 1;
                    break;
                }
                k[axis] = -m;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.offsets.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.offsets.chunks_exact(self.dim)
    }

    pub fn contains(&self, k: &[i64]) -> bool {
        self.iter().any(|o| o == k)
    }
}

/// `ball_offsets` with the default budget.
pub fn ball_offsets(r: f64, h: f64, dim: usize, mode: BallMode) -> Result<BallOffsets> {
    BallOffsets::new(r, h, dim, mode)
}

/// Largest `w ≥ 0` with `w² + row²` inside the ball, per row offset
/// `0..=max_row`; `None` once the row itself is outside.
fn half_widths(r: f64, h: f64, mode: BallMode) -> Vec<usize> {
    let t = tau(r, h);
    let m = math::floor(r / h) as u64 + 1;
    let mut out = Vec::new();
    for row in 0..=m {
        let r2 = row * row;
        if !offset_inside(r2, t, mode) {
            break;
        }
        let mut w = m;
        while !offset_inside(r2 + w * w, t, mode) {
            w -= 1;
        }
        out.push(w as usize);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Need {
    Max,
    Min,
    Both,
}

impl Need {
    fn max(self) -> bool {
        matches!(self, Need::Max | Need::Both)
    }
    fn min(self) -> bool {
        matches!(self, Need::Min | Need::Both)
    }
}

struct Extrema {
    max: Vec<f64>,
    min: Vec<f64>,
}

/// Windows cover the whole grid once the farthest pair of cells fits.
fn covers_grid(g: &GridFunction, r: f64, mode: BallMode) -> bool {
    let s: u64 = g.shape().iter().map(|&n| ((n - 1) as u64).pow(2)).sum();
    offset_inside(s, tau(r, g.spacing()), mode)
}

fn global_extrema(g: &GridFunction, need: Need) -> Extrema {
    let (lo, hi) = g.min_max();
    let fill = |v: f64| -> Vec<f64> { g.mask().iter().map(|&m| if m { v } else { SENTINEL }).collect() };
    Extrema { max: if need.max() { fill(hi) } else { Vec::new() }, min: if need.min() { fill(lo) } else { Vec::new() } }
}

/// Sliding extremum over `[i − w, i + w]` restricted to masked entries;
/// `neutral` where the window holds no masked entry.
fn sliding(
    vals: &[f64],
    mask: &[bool],
    w: usize,
    out: &mut [f64],
    neutral: f64,
    dominates: impl Fn(f64, f64) -> bool,
    dq: &mut VecDeque<usize>,
) {
    let n = vals.len();
    dq.clear();
    let mut next = 0usize;
    #[allow(clippy::needless_range_loop)]
    for i in 0..n {
        let hi = (i + w).min(n - 1);
        while next <= hi {
            if mask[next] {
                let v = vals[next];
                while let Some(&b) = dq.back() {
                    if dominates(v, vals[b]) {
                        dq.pop_back();
                    } else {
                        break;
                    }
                }
                dq.push_back(next);
            }
            next += 1;
        }
        let lo = i.saturating_sub(w);
        while let Some(&f) = dq.front() {
            if f < lo {
                dq.pop_front();
            } else {
                break;
            }
        }
        out[i] = dq.front().map_or(neutral, |&f| vals[f]);
    }
}

fn fast_1d(g: &GridFunction, r: f64, mode: BallMode, need: Need) -> Extrema {
    let n = g.len();
    let w = half_widths(r, g.spacing(), mode)[0];
    let mut dq = VecDeque::new();
    let mut max = Vec::new();
    let mut min = Vec::new();
    if need.max() {
        max = vec![SENTINEL; n];
        sliding(g.values(), g.mask(), w, &mut max, f64::NEG_INFINITY, |a, b| a >= b, &mut dq);
    }
    if need.min() {
        min = vec![SENTINEL; n];
        sliding(g.values(), g.mask(), w, &mut min, f64::INFINITY, |a, b| a <= b, &mut dq);
    }
    for (i, &m) in g.mask().iter().enumerate() {
        if !m {
            if need.max() {
                max[i] = SENTINEL;
            }
            if need.min() {
                min[i] = SENTINEL;
            }
        }
    }
    Extrema { max, min }
}

fn fast_2d(g: &GridFunction, r: f64, mode: BallMode, need: Need) -> Extrema {
    let (ny, nx) = (g.shape()[0], g.shape()[1]);
    let hw = half_widths(r, g.spacing(), mode);
    let reach = hw.len() - 1;
    let vals = g.values();
    let mask = g.mask();
    let mut max = if need.max() { vec![SENTINEL; nx * ny] } else { Vec::new() };
    let mut min = if need.min() { vec![SENTINEL; nx * ny] } else { Vec::new() };
    let mut acc_max = vec![0.0; nx];
    let mut acc_min = vec![0.0; nx];
    let mut tmp = vec![0.0; nx];
    let mut dq = VecDeque::new();
    for y in 0..ny {
        let out_row = y * nx..(y + 1) * nx;
        if !mask[out_row.clone()].iter().any(|&m| m) {
            continue;
        }
        acc_max.fill(f64::NEG_INFINITY);
        acc_min.fill(f64::INFINITY);
        let y_lo = y.saturating_sub(reach);
        let y_hi = (y + reach).min(ny - 1);
        for yy in y_lo..=y_hi {
            let w = hw[yy.abs_diff(y)];
            let row = yy * nx..(yy + 1) * nx;
            let (rv, rm) = (&vals[row.clone()], &mask[row]);
            if need.max() {
                sliding(rv, rm, w, &mut tmp, f64::NEG_INFINITY, |a, b| a >= b, &mut dq);
                for (a, &t) in acc_max.iter_mut().zip(&tmp) {
                    if t > *a {
                        *a = t;
                    }
                }
            }
            if need.min() {
                sliding(rv, rm, w, &mut tmp, f64::INFINITY, |a, b| a <= b, &mut dq);
                for (a, &t) in acc_min.iter_mut().zip(&tmp) {
                    if t < *a {
                        *a = t;
                    }
                }
            }
        }
        for x in 0..nx {
            let lin = y * nx + x;
            if mask[lin] {
                if need.max() {
                    max[lin] = acc_max[x];
                }
                if need.min() {
                    min[lin] = acc_min[x];
                }
            }
        }
    }
    Extrema { max, min }
}

fn stencil_scan(g: &GridFunction, ball: &BallOffsets, need: Need) -> Extrema {
    let d = g.dim();
    let shape = g.shape();
    let strides = g.strides();
    let n = g.len();
    let mut max = if need.max() { vec![SENTINEL; n] } else { Vec::new() };
    let mut min = if need.min() { vec![SENTINEL; n] } else { Vec::new() };
    let mut idx = vec![0usize; d];
    for lin in g.masked_indices() {
        unravel_into(shape, lin, &mut idx);
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        'offsets: for k in ball.iter() {
            let mut target = 0usize;
            for a in 0..d {
                let j = idx[a] as i64 + k[a];
                if j < 0 || j >= shape[a] as i64 {
                    continue 'offsets;
                }
                target += j as usize * strides[a];
            }
            if let Some(v) = g.get(target) {
                if v > hi {
                    hi = v;
                }
                if v < lo {
                    lo = v;
                }
            }
        }
        if need.max() {
            max[lin] = hi;
        }
        if need.min() {
            min[lin] = lo;
        }
    }
    Extrema { max, min }
}

fn extrema(g: &GridFunction, r: f64, mode: BallMode, need: Need) -> Result<Extrema> {
    check_radius(r)?;
    if covers_grid(g, r, mode) {
        return Ok(global_extrema(g, need));
    }
    match g.dim() {
        1 => Ok(fast_1d(g, r, mode, need)),
        2 => Ok(fast_2d(g, r, mode, need)),
        d => {
            let ball = BallOffsets::new(r, g.spacing(), d, mode)?;
            Ok(stencil_scan(g, &ball, need))
        }
    }
}

fn rebuild(g: &GridFunction, values: Vec<f64>) -> GridFunction {
    let mut out = g.clone();
    out.values_mut().copy_from_slice(&values);
    out
}

/// `x ↦ sup` of `g` over the ball window at `x`.
pub fn dilate(g: &GridFunction, r: f64, mode: BallMode) -> Result<GridFunction> {
    let e = extrema(g, r, mode, Need::Max)?;
    Ok(rebuild(g, e.max))
}

/// `x ↦ inf` of `g` over the ball window at `x`.
pub fn erode(g: &GridFunction, r: f64, mode: BallMode) -> Result<GridFunction> {
    let e = extrema(g, r, mode, Need::Min)?;
    Ok(rebuild(g, e.min))
}

/// `dilate − erode`, computed in one pass.
pub fn oscillation(g: &GridFunction, r: f64, mode: BallMode) -> Result<GridFunction> {
    let e = extrema(g, r, mode, Need::Both)?;
    let values =
        e.max.iter().zip(&e.min).zip(g.mask()).map(|((&hi, &lo), &m)| if m { hi - lo } else { SENTINEL }).collect();
    Ok(rebuild(g, values))
}

/// Brute-force stencil scan for every dimension; the reference the fast
/// kernels are tested against.
pub mod naive {
    use super::*;

    fn scan(g: &GridFunction, r: f64, mode: BallMode, need: Need) -> Result<Extrema> {
        let ball = BallOffsets::new(r, g.spacing(), g.dim(), mode)?;
        Ok(stencil_scan(g, &ball, need))
    }

    pub fn dilate(g: &GridFunction, r: f64, mode: BallMode) -> Result<GridFunction> {
        Ok(rebuild(g, scan(g, r, mode, Need::Max)?.max))
    }

    pub fn erode(g: &GridFunction, r: f64, mode: BallMode) -> Result<GridFunction> {
        Ok(rebuild(g, scan(g, r, mode, Need::Min)?.min))
    }

    pub fn oscillation(g: &GridFunction, r: f64, mode: BallMode) -> Result<GridFunction> {
        let e = scan(g, r, mode, Need::Both)?;
        let values =
            e.max.iter().zip(&e.min).zip(g.mask()).map(|((&hi, &lo), &m)| if m { hi - lo } else { SENTINEL }).collect();
        Ok(rebuild(g, values))
    }
}

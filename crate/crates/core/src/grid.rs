//! Sampled functions on isotropic uniform grids.
//!
//! Cells are stored row-major with the last axis fastest. Cell `j` along an
//! axis has its center at `origin + j * spacing`. A boolean mask selects the
//! cells whose centers belong to the domain `D`; unmasked cells carry a
//! sentinel that no operator reads.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Value stored in unmasked cells produced by this crate.
pub const SENTINEL: f64 = 0.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    shape: Vec<usize>,
    spacing: f64,
    origin: Vec<f64>,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl GridFunction {
    /// Builds a grid function, validating every invariant.
    ///
    /// `mask = None` means every cell belongs to the domain.
    pub fn new(
        shape: Vec<usize>,
        spacing: f64,
        origin: Vec<f64>,
        values: Vec<f64>,
        mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::Malformed("dimension must be at least 1".into()));
        }
        if shape.contains(&0) {
            return Err(Error::Malformed("every axis needs at least one cell".into()));
        }
        if origin.len() != shape.len() {
            return Err(Error::DimensionMismatch { expected: shape.len(), found: origin.len() });
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidSpacing(spacing));
        }
        let len = shape
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Malformed("cell count overflows".into()))?;
        if values.len() != len {
            return Err(Error::LengthMismatch { expected: len, found: values.len() });
        }
        let mask = match mask {
            Some(m) => {
                if m.len() != len {
                    return Err(Error::LengthMismatch { expected: len, found: m.len() });
                }
                m
            }
            None => vec![true; len],
        };
        if let Some(index) = (0..len).find(|&i| mask[i] && !values[i].is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !mask.iter().any(|&m| m) {
            return Err(Error::EmptyMask);
        }
        Ok(Self { shape, spacing, origin, values, mask })
    }

    /// Samples `f` at every cell center; cells where `f` returns `None` are
    /// left out of the domain.
    pub fn from_fn(
        shape: Vec<usize>,
        spacing: f64,
        origin: Vec<f64>,
        mut f: impl FnMut(&[f64]) -> Option<f64>,
    ) -> Result<Self> {
        let len: usize = shape.iter().product();
        let mut values = vec![SENTINEL; len];
        let mut mask = vec![false; len];
        let mut point = vec![0.0; shape.len()];
        let mut idx = vec![0usize; shape.len()];
        for lin in 0..len {
            unravel_into(&shape, lin, &mut idx);
            for (axis, p) in point.iter_mut().enumerate() {
                *p = origin[axis] + idx[axis] as f64 * spacing;
            }
            if let Some(v) = f(&point) {
                values[lin] = v;
                mask[lin] = true;
            }
        }
        Self::new(shape, spacing, origin, values, Some(mask))
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_masked(&self, lin: usize) -> bool {
        self.mask[lin]
    }

    /// Value at a masked cell, `None` outside the domain.
    pub fn get(&self, lin: usize) -> Option<f64> {
        self.mask[lin].then(|| self.values[lin])
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Lebesgue measure of one cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        crate::math::powi(self.spacing, self.dim() as i32)
    }

    /// `c · h^d · (masked cell count)`, the grid estimate of `μ(D)`.
    pub fn domain_measure(&self, c: f64) -> f64 {
        c * self.cell_volume() * self.masked_count() as f64
    }

    pub fn strides(&self) -> Vec<usize> {
        strides(&self.shape)
    }

    pub fn unravel(&self, lin: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        unravel_into(&self.shape, lin, &mut idx);
        idx
    }

    pub fn center(&self, lin: usize) -> Vec<f64> {
        let idx = self.unravel(lin);
        idx.iter().zip(&self.origin).map(|(&j, &o)| o + j as f64 * self.spacing).collect()
    }

    /// Indices of masked cells in storage order.
    pub fn masked_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    /// Minimum and maximum over the domain.
    pub fn min_max(&self) -> (f64, f64) {
        self.masked_indices()
            .map(|i| self.values[i])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// `sup_D f − inf_D f`.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self.min_max();
        hi - lo
    }

    /// Applies `f` to every masked value; the mask is kept.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let values = self.values.iter().zip(&self.mask).map(|(&v, &m)| if m { f(v) } else { SENTINEL }).collect();
        Self { values, ..self.clone() }
    }

    /// Same geometry and mask, new values (unmasked entries are ignored).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.shape.clone(), self.spacing, self.origin.clone(), values, Some(self.mask.clone()))
    }

    /// Same geometry and values, new mask. Newly masked cells must hold
    /// finite values.
    pub fn with_mask(&self, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        Self::new(self.shape.clone(), self.spacing, self.origin.clone(), values, Some(mask))
    }

    /// Number of masked cells with at least one axis neighbour outside the
    /// domain or outside the grid.
    pub fn perimeter_count(&self) -> usize {
        let strides = self.strides();
        let mut idx = vec![0usize; self.dim()];
        let mut count = 0;
        for lin in self.masked_indices() {
            unravel_into(&self.shape, lin, &mut idx);
            let on_edge = (0..self.dim()).any(|axis| {
                let j = idx[axis];
                j == 0
                    || j + 1 == self.shape[axis]
                    || !self.mask[lin - strides[axis]]
                    || !self.mask[lin + strides[axis]]
            });
            if on_edge {
                count += 1;
            }
        }
        count
    }

    /// Largest distance between two masked cell centers, bounded above by
    /// the diagonal of their bounding box.
    pub fn bounding_diameter(&self) -> f64 {
        let d = self.dim();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0usize; d];
        let mut idx = vec![0usize; d];
        for lin in self.masked_indices() {
            unravel_into(&self.shape, lin, &mut idx);
            for a in 0..d {
                lo[a] = lo[a].min(idx[a]);
                hi[a] = hi[a].max(idx[a]);
            }
        }
        let s: f64 = (0..d)
            .map(|a| {
                let e = (hi[a] - lo[a]) as f64;
                e * e
            })
            .sum();
        crate::math::sqrt(s) * self.spacing
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
}

pub fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; shape.len()];
    for a in (0..shape.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * shape[a + 1];
    }
    s
}

pub fn unravel_into(shape: &[usize], mut lin: usize, out: &mut [usize]) {
    for a in (0..shape.len()).rev() {
        out[a] = lin % shape[a];
        lin /= shape[a];
    }
}

/// `c · h^d · Σ_{masked} value` with compensated summation in storage order.
pub fn integrate(g: &GridFunction, c: f64) -> f64 {
    let s: CompensatedSum = g.masked_indices().map(|i| g.values[i]).collect();
    c * g.cell_volume() * s.value()
}

/// Which value fills the cells added by the hull extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullFill {
    /// `inf_D f`; leaves `sup`-windows on `D` unchanged.
    Min,
    /// `sup_D f`; the mirror image used for `inf`-windows.
    Max,
}

/// Extends `g` to every grid cell whose center lies in the closed convex
/// hull of the masked centers, filling new cells with `inf_D g`.
pub fn extend_to_hull(g: &GridFunction) -> Result<GridFunction> {
    extend_to_hull_with(g, HullFill::Min)
}

pub fn extend_to_hull_with(g: &GridFunction, fill: HullFill) -> Result<GridFunction> {
    let hull_mask = crate::hull::hull_mask(g)?;
    let (lo, hi) = g.min_max();
    let fill_value = match fill {
        HullFill::Min => lo,
        HullFill::Max => hi,
    };
    let mut values = g.values.clone();
    for (i, (&inside, &was)) in hull_mask.iter().zip(&g.mask).enumerate() {
        if inside && !was {
            values[i] = fill_value;
        } else if !inside && !was {
            values[i] = SENTINEL;
        }
    }
    g.with_mask(values, hull_mask)
}

/// Grid version of `μ(Conv D)` via [`crate::hull::convex_hull_volume`].
pub use crate::hull::convex_hull_volume;

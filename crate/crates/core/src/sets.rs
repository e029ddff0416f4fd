//! Analytic membership predicates for the sets `A` and `𝒜`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl BoundingBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() || min.is_empty() {
            return Err(Error::DimensionMismatch { expected: min.len(), found: max.len() });
        }
        if min.iter().zip(&max).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::param("bounding box must be nondegenerate and finite"));
        }
        Ok(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn volume(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).product()
    }

    pub fn expand(&self, by: f64) -> Self {
        Self { min: self.min.iter().map(|a| a - by).collect(), max: self.max.iter().map(|b| b + by).collect() }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.min).zip(&self.max).all(|((v, a), b)| a <= v && v <= b)
    }

    fn intersect(&self, other: &Self) -> Self {
        Self {
            min: self.min.iter().zip(&other.min).map(|(a, b)| a.max(*b)).collect(),
            max: self.max.iter().zip(&other.max).map(|(a, b)| a.min(*b)).collect(),
        }
    }

    fn hull(&self, other: &Self) -> Self {
        Self {
            min: self.min.iter().zip(&other.min).map(|(a, b)| a.min(*b)).collect(),
            max: self.max.iter().zip(&other.max).map(|(a, b)| a.max(*b)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    Ball {
        center: Vec<f64>,
        radius: f64,
        closed: bool,
    },
    /// `inner < |y − center| < outer`, either end optionally closed.
    Annulus {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
        inner_closed: bool,
        outer_closed: bool,
    },
    /// Closed box.
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
    },
    /// `normal · y ≥ offset`; unbounded, so only usable inside an intersection.
    HalfSpace {
        normal: Vec<f64>,
        offset: f64,
    },
    Union(Vec<SetSpec>),
    Intersection(Vec<SetSpec>),
    /// Union of grid cells `center ± h/2` for the masked cells.
    Mask {
        origin: Vec<f64>,
        spacing: f64,
        shape: Vec<usize>,
        cells: Vec<bool>,
    },
    Complement(Box<SetSpec>),
}

impl SetSpec {
    /// Open annulus `inner < |y − center| < outer`.
    pub fn annulus(center: Vec<f64>, inner: f64, outer: f64) -> Self {
        SetSpec::Annulus { center, inner, outer, inner_closed: false, outer_closed: false }
    }

    /// `inner ≤ |y − center| < outer`.
    pub fn annulus_closed_open(center: Vec<f64>, inner: f64, outer: f64) -> Self {
        SetSpec::Annulus { center, inner, outer, inner_closed: true, outer_closed: false }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            SetSpec::Ball { center, .. } | SetSpec::Annulus { center, .. } => Some(center.len()),
            SetSpec::Box { min, .. } => Some(min.len()),
            SetSpec::HalfSpace { normal, .. } => Some(normal.len()),
            SetSpec::Mask { origin, .. } => Some(origin.len()),
            SetSpec::Union(parts) | SetSpec::Intersection(parts) => parts.iter().find_map(|p| p.dim()),
            SetSpec::Complement(inner) => inner.dim(),
        }
    }

    /// Checks dimensions and parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let dim = self.dim().ok_or_else(|| Error::param("set has no dimension"))?;
        self.validate_dim(dim)
    }

    fn validate_dim(&self, dim: usize) -> Result<()> {
        let same = |n: usize| {
            if n == dim {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: dim, found: n })
            }
        };
        match self {
            SetSpec::Ball { center, radius, .. } => {
                same(center.len())?;
                if !(*radius > 0.0) {
                    return Err(Error::param("ball radius must be positive"));
                }
            }
            SetSpec::Annulus { center, inner, outer, .. } => {
                same(center.len())?;
                if !(*inner >= 0.0 && inner < outer) {
                    return Err(Error::param("annulus needs 0 ≤ inner < outer"));
                }
            }
            SetSpec::Box { min, max } => {
                same(min.len())?;
                BoundingBox::new(min.clone(), max.clone())?;
            }
            SetSpec::HalfSpace { normal, .. } => {
                same(normal.len())?;
                if math::norm(normal) == 0.0 {
                    return Err(Error::param("half-space normal must be nonzero"));
                }
            }
            SetSpec::Union(parts) | SetSpec::Intersection(parts) => {
                if parts.is_empty() {
                    return Err(Error::param("set combination needs at least one part"));
                }
                for p in parts {
                    p.validate_dim(dim)?;
                }
            }
            SetSpec::Mask { origin, spacing, shape, cells } => {
                same(origin.len())?;
                same(shape.len())?;
                if !(*spacing > 0.0) {
                    return Err(Error::InvalidSpacing(*spacing));
                }
                let len: usize = shape.iter().product();
                if cells.len() != len {
                    return Err(Error::LengthMismatch { expected: len, found: cells.len() });
                }
            }
            SetSpec::Complement(inner) => inner.validate_dim(dim)?,
        }
        if self.bounding_box().is_none() && !matches!(self, SetSpec::HalfSpace { .. }) {
            // Complements and unions with half-spaces are allowed as parts only.
        }
        Ok(())
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        match self {
            SetSpec::Ball { center, radius, closed } => {
                let d2 = math::dist2(y, center);
                let r2 = radius * radius;
                if *closed {
                    d2 <= r2
                } else {
                    d2 < r2
                }
            }
            SetSpec::Annulus { center, inner, outer, inner_closed, outer_closed } => {
                let d = math::dist(y, center);
                let above = if *inner_closed { d >= *inner } else { d > *inner };
                let below = if *outer_closed { d <= *outer } else { d < *outer };
                above && below
            }
            SetSpec::Box { min, max } => y.iter().zip(min).zip(max).all(|((v, a), b)| a <= v && v <= b),
            SetSpec::HalfSpace { normal, offset } => normal.iter().zip(y).map(|(n, v)| n * v).sum::<f64>() >= *offset,
            SetSpec::Union(parts) => parts.iter().any(|p| p.contains(y)),
            SetSpec::Intersection(parts) => parts.iter().all(|p| p.contains(y)),
            SetSpec::Mask { origin, spacing, shape, cells } => {
                let mut lin = 0usize;
                for a in 0..shape.len() {
                    let j = math::round((y[a] - origin[a]) / spacing);
                    if j < 0.0 || j >= shape[a] as f64 {
                        return false;
                    }
                    lin = lin * shape[a] + j as usize;
                }
                cells[lin]
            }
            SetSpec::Complement(inner) => !inner.contains(y),
        }
    }

    /// A box containing the set, `None` when unbounded.
    pub fn bounding_box(&self) -> Option<BoundingBox> {
        match self {
            SetSpec::Ball { center, radius, .. } => Some(BoundingBox {
                min: center.iter().map(|c| c - radius).collect(),
                max: center.iter().map(|c| c + radius).collect(),
            }),
            SetSpec::Annulus { center, outer, .. } => Some(BoundingBox {
                min: center.iter().map(|c| c - outer).collect(),
                max: center.iter().map(|c| c + outer).collect(),
            }),
            SetSpec::Box { min, max } => Some(BoundingBox { min: min.clone(), max: max.clone() }),
            SetSpec::HalfSpace { .. } | SetSpec::Complement(_) => None,
            SetSpec::Union(parts) => {
                let mut boxes = parts.iter().map(|p| p.bounding_box());
                let first = boxes.next()??;
                boxes.try_fold(first, |acc, b| Some(acc.hull(&b?)))
            }
            SetSpec::Intersection(parts) => {
                parts.iter().filter_map(|p| p.bounding_box()).reduce(|a, b| a.intersect(&b))
            }
            SetSpec::Mask { origin, spacing, shape, .. } => Some(BoundingBox {
                min: origin.iter().map(|o| o - spacing / 2.0).collect(),
                max: origin.iter().zip(shape).map(|(o, &n)| o + (n as f64 - 0.5) * spacing).collect(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn annulus_end_conventions() {
        let a = SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.9, 1.1);
        assert!(a.contains(&[0.9, 0.0]));
        assert!(!a.contains(&[1.1, 0.0]));
        let open = SetSpec::annulus(vec![0.0, 0.0], 0.9, 1.1);
        assert!(!open.contains(&[0.9, 0.0]));
    }

    #[test]
    fn half_annulus_box_is_clipped() {
        let half = SetSpec::Intersection(vec![
            SetSpec::annulus(vec![0.0, 0.0], 1.0, 2.0),
            SetSpec::HalfSpace { normal: vec![0.0, 1.0], offset: 0.0 },
        ]);
        let b = half.bounding_box().unwrap();
        assert_eq!(b.min, vec![-2.0, -2.0]);
        assert!(half.contains(&[0.0, 1.5]));
        assert!(!half.contains(&[0.0, -1.5]));
        half.validate().unwrap();
    }

    #[test]
    fn mask_cells() {
        let m = SetSpec::Mask { origin: vec![0.0], spacing: 1.0, shape: vec![3], cells: vec![false, true, false] };
        assert!(m.contains(&[1.2]));
        assert!(!m.contains(&[0.2]));
        assert!(!m.contains(&[5.0]));
        let b = m.bounding_box().unwrap();
        assert_eq!((b.min[0], b.max[0]), (-0.5, 2.5));
    }

    #[test]
    fn union_bbox_and_validation() {
        let u = SetSpec::Union(vec![
            SetSpec::Ball { center: vec![0.0, 0.0], radius: 1.0, closed: false },
            SetSpec::Box { min: vec![2.0, 2.0], max: vec![3.0, 4.0] },
        ]);
        let b = u.bounding_box().unwrap();
        assert_eq!((b.min.clone(), b.max.clone()), (vec![-1.0, -1.0], vec![3.0, 4.0]));
        assert!(SetSpec::Union(vec![
            SetSpec::Ball { center: vec![0.0], radius: 1.0, closed: false },
            SetSpec::Ball { center: vec![0.0, 0.0], radius: 1.0, closed: false },
        ])
        .validate()
        .is_err());
    }
}

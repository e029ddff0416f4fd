//! Convex hulls of masked cell centers in `d ≤ 3`.
//!
//! All geometry runs on integer cell indices, so orientation tests are
//! exact and cells lying on the hull boundary are always included.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{unravel_into, GridFunction};

pub const MAX_HULL_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct HullInfo {
    /// Lebesgue measure of the hull in physical units.
    pub volume: f64,
    /// Hull vertices in physical coordinates (unordered for `d = 3`).
    pub vertices: Vec<Vec<f64>>,
    /// The masked centers span fewer than `d` dimensions.
    pub degenerate: bool,
    /// `volume` was supplied by configuration instead of computed.
    pub overridden: bool,
}

impl HullInfo {
    /// A hull volume taken from configuration, used where no hull can be
    /// built (`d > 3`).
    pub fn with_override(volume: f64) -> Self {
        Self { volume, vertices: Vec::new(), degenerate: false, overridden: true }
    }
}

type P3 = [i64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> [i128; 3] {
    let (a0, a1, a2) = (a[0] as i128, a[1] as i128, a[2] as i128);
    let (b0, b1, b2) = (b[0] as i128, b[1] as i128, b[2] as i128);
    [a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0]
}

fn dot(n: [i128; 3], v: P3) -> i128 {
    n[0] * v[0] as i128 + n[1] * v[1] as i128 + n[2] * v[2] as i128
}

fn orient(a: P3, b: P3, c: P3, d: P3) -> i128 {
    dot(cross(sub(b, a), sub(c, a)), sub(d, a))
}

fn cross2(o: [i64; 2], a: [i64; 2], b: [i64; 2]) -> i128 {
    (a[0] - o[0]) as i128 * (b[1] - o[1]) as i128 - (a[1] - o[1]) as i128 * (b[0] - o[0]) as i128
}

/// Counter-clockwise hull without collinear vertices (Andrew's monotone chain).
fn hull2(points: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[i64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross2(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[i64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_contains(poly: &[[i64; 2]], q: [i64; 2]) -> bool {
    let n = poly.len();
    (0..n).all(|i| cross2(poly[i], poly[(i + 1) % n], q) >= 0)
}

fn polygon_area2(poly: &[[i64; 2]]) -> i128 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] as i128 * b[1] as i128 - b[0] as i128 * a[1] as i128
        })
        .sum()
}

/// Hull of a finite set of integer points, classified by affine rank.
enum Shape {
    Point(P3),
    Segment { a: P3, dir: P3, lo: i128, hi: i128 },
    Planar { base: P3, normal: [i128; 3], drop: usize, poly: Vec<[i64; 2]> },
    Solid { faces: Vec<[usize; 3]>, points: Vec<P3> },
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn primitive(v: P3) -> P3 {
    let g = gcd(gcd(v[0], v[1]), v[2]).max(1);
    [v[0] / g, v[1] / g, v[2] / g]
}

fn project2(p: P3, drop: usize) -> [i64; 2] {
    match drop {
        0 => [p[1], p[2]],
        1 => [p[0], p[2]],
        _ => [p[0], p[1]],
    }
}

impl Shape {
    fn build(points: &[P3]) -> Shape {
        let p0 = points[0];
        let Some(&p1) = points.iter().find(|&&p| p != p0) else {
            return Shape::Point(p0);
        };
        let dir = primitive(sub(p1, p0));
        let Some(&p2) = points.iter().find(|&&p| cross(dir, sub(p, p0)) != [0; 3]) else {
            let proj = |p: P3| dot([dir[0] as i128, dir[1] as i128, dir[2] as i128], sub(p, p0));
            let lo = points.iter().map(|&p| proj(p)).min().unwrap_or(0);
            let hi = points.iter().map(|&p| proj(p)).max().unwrap_or(0);
            return Shape::Segment { a: p0, dir, lo, hi };
        };
        let normal = cross(dir, sub(p2, p0));
        let Some(&p3) = points.iter().find(|&&p| dot(normal, sub(p, p0)) != 0) else {
            let drop = (0..3).max_by_key(|&i| normal[i].abs()).unwrap_or(2);
            let proj: Vec<[i64; 2]> = points.iter().map(|&p| project2(p, drop)).collect();
            return Shape::Planar { base: p0, normal, drop, poly: hull2(&proj) };
        };
        Shape::Solid { faces: hull3(points, [p0, p1, p2, p3]), points: points.to_vec() }
    }

    fn contains(&self, q: P3) -> bool {
        match self {
            Shape::Point(p) => *p == q,
            Shape::Segment { a, dir, lo, hi } => {
                let v = sub(q, *a);
                if cross(*dir, v) != [0; 3] {
                    return false;
                }
                let t = dot([dir[0] as i128, dir[1] as i128, dir[2] as i128], v);
                *lo <= t && t <= *hi
            }
            Shape::Planar { base, normal, drop, poly } => {
                dot(*normal, sub(q, *base)) == 0 && polygon_contains(poly, project2(q, *drop))
            }
            Shape::Solid { faces, points } => {
                faces.iter().all(|f| orient(points[f[0]], points[f[1]], points[f[2]], q) <= 0)
            }
        }
    }

    fn vertices(&self) -> Vec<P3> {
        match self {
            Shape::Point(p) => vec![*p],
            Shape::Segment { a, dir, lo, hi } => {
                // Recover the two extreme points from their projections.
                let len2 = dot([dir[0] as i128, dir[1] as i128, dir[2] as i128], *dir);
                let at = |t: i128| -> P3 {
                    let mut p = *a;
                    for i in 0..3 {
                        p[i] += (dir[i] as i128 * t / len2) as i64;
                    }
                    p
                };
                if lo == hi {
                    vec![at(*lo)]
                } else {
                    vec![at(*lo), at(*hi)]
                }
            }
            Shape::Planar { base, normal, drop, poly } => {
                // Lift each projected vertex back onto the plane.
                let d = *drop;
                let nd = normal[d];
                poly.iter()
                    .map(|q2| {
                        let mut p = [0i64; 3];
                        let others: [usize; 2] = match d {
                            0 => [1, 2],
                            1 => [0, 2],
                            _ => [0, 1],
                        };
                        p[others[0]] = q2[0];
                        p[others[1]] = q2[1];
                        let rest = normal[others[0]] * (p[others[0]] - base[others[0]]) as i128
                            + normal[others[1]] * (p[others[1]] - base[others[1]]) as i128;
                        p[d] = base[d] - (rest / nd) as i64;
                        p
                    })
                    .collect()
            }
            Shape::Solid { faces, points } => {
                let set: BTreeSet<usize> = faces.iter().flat_map(|f| f.iter().copied()).collect();
                set.into_iter().map(|i| points[i]).collect()
            }
        }
    }
}

/// Incremental 3-D hull. Faces are index triples oriented outward.
fn hull3(points: &[P3], seed: [P3; 4]) -> Vec<[usize; 3]> {
    let find = |p: P3| points.iter().position(|&q| q == p).unwrap_or(0);
    let [a, b, c, d] = seed.map(find);
    let mut faces: Vec<[usize; 3]> = if orient(points[a], points[b], points[c], points[d]) < 0 {
        vec![[a, b, c], [a, c, d], [a, d, b], [b, d, c]]
    } else {
        vec![[a, c, b], [a, d, c], [a, b, d], [b, c, d]]
    };
    for (pi, &p) in points.iter().enumerate() {
        let visible: Vec<bool> =
            faces.iter().map(|f| orient(points[f[0]], points[f[1]], points[f[2]], p) > 0).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let edges: BTreeSet<(usize, usize)> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| v)
            .flat_map(|(f, _)| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .collect();
        let horizon: Vec<(usize, usize)> = edges.iter().copied().filter(|&(u, v)| !edges.contains(&(v, u))).collect();
        let mut kept: Vec<[usize; 3]> = faces.iter().zip(&visible).filter(|(_, &v)| !v).map(|(f, _)| *f).collect();
        kept.extend(horizon.into_iter().map(|(u, v)| [u, v, pi]));
        faces = kept;
    }
    faces
}

fn hull_volume_units(shape: &Shape, dim: usize) -> (f64, bool) {
    match (shape, dim) {
        (Shape::Segment { lo, hi, dir, .. }, 1) => ((hi - lo) as f64 / dir[0].abs() as f64, false),
        (Shape::Planar { poly, .. }, 2) if poly.len() >= 3 => (polygon_area2(poly) as f64 / 2.0, false),
        (Shape::Solid { faces, points }, 3) => {
            let o = points[0];
            let vol6: i128 = faces.iter().map(|f| -orient(points[f[0]], points[f[1]], points[f[2]], o)).sum();
            (vol6 as f64 / 6.0, false)
        }
        _ => (0.0, true),
    }
}

fn lift(idx: &[usize]) -> P3 {
    let mut p = [0i64; 3];
    for (a, &j) in idx.iter().enumerate() {
        p[a] = j as i64;
    }
    p
}

/// Masked cells that can be hull vertices: the extremes of every line along
/// the last axis.
fn candidate_points(g: &GridFunction) -> Vec<P3> {
    let d = g.dim();
    let shape = g.shape();
    let last = shape[d - 1];
    let lines = g.len() / last;
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    for line in 0..lines {
        let base = line * last;
        let first = (0..last).find(|&k| g.is_masked(base + k));
        let Some(first) = first else { continue };
        let end = (0..last).rev().find(|&k| g.is_masked(base + k)).unwrap_or(first);
        for k in [first, end] {
            unravel_into(shape, base + k, &mut idx);
            out.push(lift(&idx));
            if first == end {
                break;
            }
        }
    }
    out
}

fn check_dim(g: &GridFunction) -> Result<()> {
    if g.dim() > MAX_HULL_DIM {
        return Err(Error::UnsupportedDimension { dim: g.dim(), max: MAX_HULL_DIM });
    }
    Ok(())
}

/// Mask of every grid cell whose center lies in the closed convex hull of
/// the masked centers.
pub fn hull_mask(g: &GridFunction) -> Result<Vec<bool>> {
    check_dim(g)?;
    let shape = Shape::build(&candidate_points(g));
    let mut idx = vec![0usize; g.dim()];
    Ok((0..g.len())
        .map(|lin| {
            g.is_masked(lin) || {
                unravel_into(g.shape(), lin, &mut idx);
                shape.contains(lift(&idx))
            }
        })
        .collect())
}

/// Volume of the convex hull of the masked cell centers.
///
/// Lower-dimensional hulls (a single point, collinear centers in 2-D,
/// coplanar centers in 3-D) have volume 0 and are flagged degenerate.
pub fn convex_hull_volume(g: &GridFunction) -> Result<HullInfo> {
    check_dim(g)?;
    let shape = Shape::build(&candidate_points(g));
    let (units, degenerate) = hull_volume_units(&shape, g.dim());
    let h = g.spacing();
    let vertices =
        shape.vertices().into_iter().map(|p| (0..g.dim()).map(|a| g.origin()[a] + p[a] as f64 * h).collect()).collect();
    Ok(HullInfo { volume: units * g.cell_volume(), vertices, degenerate, overridden: false })
}

//! Nearest-point projection onto a finite target set `H`, the approach map
//! `T_Δ`, membership in `T_Δ`-images and the 2δ-step decomposition of a set
//! into the pieces `A_k`, `𝒜_k` and `𝒜*`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::report::CheckReport;
use crate::sets::SetSpec;

/// Relative tolerance on squared distances for projection ties and
/// duplicate sites.
pub const TIE_RELATIVE: f64 = 1e-12;

/// Distance below which a point counts as lying on `H̄`.
pub const ON_TARGET: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Provenance {
    #[default]
    Explicit,
    MaskCenters,
    Sampled,
}

/// Finite stand-in for the target set `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSet {
    sites: Vec<Vec<f64>>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionResult {
    pub site: usize,
    pub distance: f64,
    /// Another site is equally close within [`TIE_RELATIVE`].
    pub tie: bool,
}

impl TargetSet {
    pub fn new(sites: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_provenance(sites, Provenance::Explicit)
    }

    pub fn with_provenance(sites: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        let dim = sites.first().ok_or_else(|| Error::param("target set needs at least one site"))?.len();
        if dim == 0 {
            return Err(Error::param("sites must have at least one coordinate"));
        }
        for s in &sites {
            if s.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.len() });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::param("site coordinates must be finite"));
            }
        }
        let mut order: Vec<usize> = (0..sites.len()).collect();
        order.sort_by(|&a, &b| {
            sites[a]
                .iter()
                .zip(&sites[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        for w in order.windows(2) {
            let (a, b) = (&sites[w[0]], &sites[w[1]]);
            let scale = math::norm(a).max(math::norm(b)).max(1.0);
            if math::dist(a, b) <= TIE_RELATIVE * scale {
                return Err(Error::param(alloc::format!("duplicate sites {} and {}", w[0], w[1])));
            }
        }
        Ok(Self { sites, provenance })
    }

    /// Centers of the masked cells of a grid.
    pub fn from_mask(g: &crate::grid::GridFunction) -> Result<Self> {
        Self::with_provenance(g.masked_indices().map(|i| g.center(i)).collect(), Provenance::MaskCenters)
    }

    pub fn dim(&self) -> usize {
        self.sites[0].len()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &[f64] {
        &self.sites[i]
    }

    /// Nearest site by squared distance; the lowest index wins ties.
    pub fn project(&self, x: &[f64]) -> ProjectionResult {
        let mut best = 0;
        let mut best_d2 = f64::INFINITY;
        let mut tie = false;
        for (i, s) in self.sites.iter().enumerate() {
            let d2 = math::dist2(x, s);
            if d2 < best_d2 {
                tie = best_d2.is_finite() && best_d2 - d2 <= TIE_RELATIVE * best_d2;
                best = i;
                best_d2 = d2;
            } else if d2 - best_d2 <= TIE_RELATIVE * best_d2 {
                tie = true;
            }
        }
        ProjectionResult { site: best, distance: math::sqrt(best_d2), tie }
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        self.project(x).distance
    }
}

/// `T_Δ x` given the projection of `x`.
fn approach_from(x: &[f64], p: &[f64], distance: f64, delta: f64, out: &mut [f64]) {
    if distance > delta {
        let s = delta / distance;
        for ((o, &xi), &pi) in out.iter_mut().zip(x).zip(p) {
            *o = xi + s * (pi - xi);
        }
    } else {
        out.copy_from_slice(p);
    }
}

/// `T_Δ x`: moves `x` a distance `Δ` toward its nearest site, or onto it
/// when it is closer than `Δ`.
pub fn approach(x: &[f64], h: &TargetSet, delta: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    if delta > 0.0 {
        let p = h.project(x);
        approach_from(x, h.site(p.site), p.distance, delta, &mut out);
    }
    out
}

/// The unique point `y` with `π(y) = p` and `T_Δ y = x`, if it exists.
fn preimage_via(x: &[f64], h: &TargetSet, site: usize, delta: f64) -> Option<Vec<f64>> {
    let p = h.site(site);
    let dist = math::dist(x, p);
    if dist == 0.0 {
        return None;
    }
    let s = delta / dist;
    let y: Vec<f64> = x.iter().zip(p).map(|(&xi, &pi)| xi + s * (xi - pi)).collect();
    let proj = h.project(&y);
    (proj.site == site && !proj.tie && proj.distance > delta).then_some(y)
}

/// All preimages of `x` under `T_Δ` among points farther than `Δ` from `H`.
/// By injectivity there is at most one outside measure-zero tie sets.
fn preimage(x: &[f64], h: &TargetSet, delta: f64, a: &SetSpec) -> Option<Vec<f64>> {
    (0..h.len()).filter_map(|i| preimage_via(x, h, i, delta)).find(|y| a.contains(y))
}

/// Whether `x ∈ T_Δ A`.
///
/// Candidates are `y_p = x + Δ(x − p)/|x − p|` for each site `p`; one is
/// accepted when `p` is its unique nearest site, `d(y_p, H) > Δ` and
/// `y_p ∈ A`. Points of `H̄` (mapped onto by the whole `Δ`-collar) are
/// reported as [`Error::OnTargetSet`] so Monte Carlo callers redraw.
pub fn tdelta_image_membership(x: &[f64], h: &TargetSet, delta: f64, a: &SetSpec) -> Result<bool> {
    if delta == 0.0 {
        return Ok(a.contains(x));
    }
    if !(delta > 0.0) {
        return Err(Error::param("Δ must be nonnegative"));
    }
    if h.distance(x) < ON_TARGET {
        return Err(Error::OnTargetSet);
    }
    Ok(preimage(x, h, delta, a).is_some())
}

/// `d(T_Δx, T_Δy) ≥ ((R−Δ)/R) d(x, y) − 10⁻⁹` with `R = min(d(x,H), d(y,H))`.
/// Pairs with `R < Δ` are skipped.
pub fn contraction_check(h: &TargetSet, delta: f64, pairs: &[(Vec<f64>, Vec<f64>)]) -> CheckReport {
    let mut report = CheckReport::new("contraction", f64::NEG_INFINITY, 1e-9);
    let mut worst_ratio = f64::INFINITY;
    let mut worst_normalized = f64::INFINITY;
    for (x, y) in pairs {
        let r = h.distance(x).min(h.distance(y));
        if r < delta || r == 0.0 {
            report.skipped += 1;
            continue;
        }
        report.evaluated += 1;
        let before = math::dist(x, y);
        let after = math::dist(&approach(x, h, delta), &approach(y, h, delta));
        let factor = (r - delta) / r;
        let deficit = factor * before - after;
        report.measured = report.measured.max(deficit);
        if deficit > 1e-9 {
            report.violations += 1;
        }
        if before > 0.0 {
            worst_ratio = worst_ratio.min(after / before);
            if factor > 0.0 {
                worst_normalized = worst_normalized.min(after / (factor * before));
            }
        }
    }
    if report.evaluated == 0 {
        report.measured = 0.0;
    }
    report.slack = report.bound - report.measured;
    report.passed = report.violations == 0;
    report.detail("worst_ratio", worst_ratio).detail("worst_ratio_over_factor", worst_normalized)
}

/// Finite-difference check of `−ḟ(0) ≤ f(0)/r` for `f(t) = d(T_t x, T_t y)`,
/// plus the integrated form `f(Δ)/f(0) ≥ (R−Δ)/R` with `R = min(d(x,H), d(y,H))`
/// at every step and at `Δ = R/2`.
///
/// `kappa` is the curvature allowance on the forward difference; by default
/// `10 f(0)/r²`.
pub fn derivative_check(
    h: &TargetSet,
    x: &[f64],
    y: &[f64],
    r: f64,
    steps: &[f64],
    kappa: Option<f64>,
) -> Result<CheckReport> {
    let (dx, dy) = (h.distance(x), h.distance(y));
    if !(r > 0.0) || dx < r || dy < r {
        return Err(Error::hypothesis(alloc::format!(
            "both points must be at distance ≥ r = {r} from H (got {dx}, {dy})"
        )));
    }
    if x == y {
        return Err(Error::hypothesis("the two points must differ"));
    }
    if steps.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::param("steps must be positive"));
    }
    let f = |t: f64| math::dist(&approach(x, h, t), &approach(y, h, t));
    let f0 = f(0.0);
    let kappa = kappa.unwrap_or(10.0 * f0 / (r * r));
    let big_r = dx.min(dy);
    let mut report = CheckReport::new("derivative", f64::NEG_INFINITY, 0.0);
    let mut fitted = f64::INFINITY;
    for &s in steps {
        report.evaluated += 1;
        let slope = (f(s) - f0) / s;
        fitted = fitted.min(slope);
        let deficit = -f0 / r - kappa * s - slope;
        report.measured = report.measured.max(deficit);
        if deficit > 0.0 {
            report.violations += 1;
        }
    }
    let mut integrated = f64::INFINITY;
    for delta in steps.iter().copied().chain([big_r / 2.0]).filter(|&d| d <= big_r) {
        report.evaluated += 1;
        let ratio = f(delta) / f0;
        let floor = (big_r - delta) / big_r;
        integrated = integrated.min(ratio - floor);
        if ratio < floor - 1e-9 {
            report.violations += 1;
        }
    }
    report.slack = -report.measured;
    report.passed = report.violations == 0;
    Ok(report
        .detail("f0", f0)
        .detail("slope", fitted)
        .detail("slope_bound", -f0 / r)
        .detail("kappa", kappa)
        .detail("integrated_margin", integrated))
}

/// `K = ⌊r/(2δ) − ½⌋ = max{k : r − (2k+1)δ ≥ 0}`.
///
/// Both characterizations are evaluated with a relative tolerance of 10⁻⁹
/// so that exact boundary cases such as `r = 3δ` survive rounding, and they
/// are required to agree.
pub fn k_max(r: f64, delta: f64) -> Result<u32> {
    if !(delta > 0.0) || !r.is_finite() || delta * 3.0 > r * (1.0 + 1e-9) {
        return Err(Error::hypothesis(alloc::format!("need 0 < δ ≤ r/3, got r = {r}, δ = {delta}")));
    }
    let q = r / (2.0 * delta) - 0.5;
    let by_floor = math::floor(q + 1e-9 * q.max(1.0));
    let mut by_max = 0u64;
    while r - (2.0 * (by_max + 1) as f64 + 1.0) * delta >= -1e-9 * r {
        by_max += 1;
    }
    if by_floor != by_max as f64 {
        return Err(Error::Internal(alloc::format!("K mismatch: floor {by_floor}, max {by_max}")));
    }
    u32::try_from(by_max).map_err(|_| Error::param("δ too small relative to r"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AkLabel {
    /// `x ∈ A_k`: the first `k` iterates stay in the set, the next leaves
    /// (for `k = K` all `K` iterates stay).
    Class(u32),
    /// `d(x, H) < r − δ`.
    InsideCollar,
}

/// Which piece of `𝒜 = 𝒜_0 ∪ … ∪ 𝒜_K ∪ 𝒜*` the point lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// `x ∈ T^step A_k`.
    Chain {
        k: u32,
        step: u32,
    },
    Star,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AkClass {
    pub label: AkLabel,
    pub piece: Piece,
    /// Forward iterates `z, Tz, T²z, …` starting at the `A_k` point `z` of the
    /// chain through `x` (`z = x` outside the collar), up to and including the
    /// first iterate outside the set. Just `[x]` for points of `𝒜*`.
    pub trail: Vec<Vec<f64>>,
    /// Some projection along the way was tied.
    pub tie: bool,
}

fn check_step(r: f64, delta: f64, d: usize) -> Result<()> {
    let limit = r / (2 * d + 1) as f64;
    if !(delta > 0.0 && delta < limit) {
        return Err(Error::hypothesis(alloc::format!("need 0 < δ < r/(2d+1) = {limit}, got δ = {delta}")));
    }
    Ok(())
}

/// Forward classification of a point outside the collar.
fn forward(x: &[f64], a: &SetSpec, h: &TargetSet, k_cap: u32, step: f64) -> (u32, Vec<Vec<f64>>, bool) {
    let mut trail = vec![x.to_vec()];
    let mut tie = false;
    let mut k = 0;
    while k < k_cap {
        let cur = trail.last().unwrap();
        let p = h.project(cur);
        tie |= p.tie;
        let mut next = cur.clone();
        approach_from(cur, h.site(p.site), p.distance, step, &mut next);
        let inside = a.contains(&next);
        trail.push(next);
        if !inside {
            return (k, trail, tie);
        }
        k += 1;
    }
    (k, trail, tie)
}

/// Classifies `x ∈ A` by how many 2δ-steps toward `H` stay in `A`.
pub fn ak_classify(x: &[f64], a: &SetSpec, h: &TargetSet, r: f64, delta: f64) -> Result<AkClass> {
    check_step(r, delta, x.len())?;
    if !a.contains(x) {
        return Err(Error::param("point is not in the set"));
    }
    let k_cap = k_max(r, delta)?;
    let step = 2.0 * delta;
    let p = h.project(x);
    if p.distance >= r - delta {
        let (k, trail, tie) = forward(x, a, h, k_cap, step);
        return Ok(AkClass { label: AkLabel::Class(k), piece: Piece::Chain { k, step: 0 }, trail, tie: tie || p.tie });
    }
    // Walk back through preimages inside the set until leaving the collar.
    let mut cur = x.to_vec();
    let mut back = 0u32;
    let mut piece = Piece::Star;
    let mut trail = vec![x.to_vec()];
    let mut tie = p.tie;
    while back <= k_cap {
        let Some(prev) = preimage(&cur, h, step, a) else { break };
        back += 1;
        if h.distance(&prev) >= r - delta {
            let (k, fwd, fwd_tie) = forward(&prev, a, h, k_cap, step);
            tie |= fwd_tie;
            if back <= k || (k == k_cap && back == k + 1) {
                piece = Piece::Chain { k, step: back };
                trail = fwd;
            }
            break;
        }
        cur = prev;
    }
    if piece == Piece::Star {
        tie |= h.project(&cur).tie;
    }
    Ok(AkClass { label: AkLabel::InsideCollar, piece, trail, tie })
}

/// Whether `x ∈ 𝒯A = (A ∩ H^{(r−δ)}) ∪ T A`, with `T` the 2δ-step.
pub fn tee_membership(x: &[f64], a: &SetSpec, h: &TargetSet, r: f64, delta: f64) -> Result<bool> {
    check_step(r, delta, x.len())?;
    if h.distance(x) < r - delta && a.contains(x) {
        return Ok(true);
    }
    tdelta_image_membership(x, h, 2.0 * delta, a)
}

/// Classifies `n` random points of `A` and checks every trail: a class-`k`
/// point keeps its first `k` iterates in `A` and loses the next one (unless
/// `k = K`), collar points lie within `r − δ`, chained collar points sit at
/// the recorded step of their chain, and labels do not depend on the order
/// of the sites unless a projection tie was involved.
pub fn decomposition_check(a: &SetSpec, h: &TargetSet, r: f64, delta: f64, n: usize, seed: u64) -> Result<CheckReport> {
    check_step(r, delta, h.dim())?;
    let bbox = a.bounding_box().ok_or_else(|| Error::param("set must be bounded"))?;
    let k_cap = k_max(r, delta)?;
    let mut reversed_sites = h.sites().to_vec();
    reversed_sites.reverse();
    let reversed = TargetSet::new(reversed_sites)?;
    let mut report = CheckReport::new("decomposition", 0.0, 0.0);
    let (mut collar, mut star, mut ties) = (0u64, 0u64, 0u64);
    let mut classes = vec![0u64; k_cap as usize + 1];
    for x in crate::measure::sample_inside(a, &bbox, n, seed)? {
        let class = ak_classify(&x, a, h, r, delta)?;
        report.evaluated += 1;
        ties += class.tie as u64;
        let consistent = match (class.label, class.piece) {
            (AkLabel::Class(k), _) => {
                classes[k as usize] += 1;
                let k = k as usize;
                class.trail[0] == x
                    && class.trail[1..=k].iter().all(|p| a.contains(p))
                    && (k == k_cap as usize || !a.contains(&class.trail[k + 1]))
            }
            (AkLabel::InsideCollar, piece) => {
                collar += 1;
                let near = h.distance(&x) < r - delta;
                match piece {
                    Piece::Star => {
                        star += 1;
                        near
                    }
                    Piece::Chain { k, step } => {
                        let origin = ak_classify(&class.trail[0], a, h, r, delta)?;
                        near && origin.label == AkLabel::Class(k)
                            && math::dist(&class.trail[step as usize], &x) <= 1e-9 * (1.0 + math::norm(&x))
                    }
                }
            }
        };
        let relabeled = ak_classify(&x, a, &reversed, r, delta)?;
        let stable = class.tie || relabeled.tie || (relabeled.label, relabeled.piece) == (class.label, class.piece);
        if !consistent || !stable {
            report.violations += 1;
        }
    }
    report.measured = report.violations as f64;
    report.slack = -report.measured;
    report.passed = report.violations == 0;
    let mut report = report
        .detail("k_max", k_cap as f64)
        .detail("inside_collar", collar as f64)
        .detail("star", star as f64)
        .detail("ties", ties as f64);
    for (k, count) in classes.iter().enumerate() {
        report = report.detail(alloc::format!("class_{k}"), *count as f64);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> TargetSet {
        TargetSet::new(vec![vec![0.0, 0.0]]).unwrap()
    }

    #[test]
    fn projection_examples() {
        let p = origin().project(&[3.0, 4.0]);
        assert_eq!((p.site, p.distance, p.tie), (0, 5.0, false));
        let two = TargetSet::new(vec![vec![-1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let p = two.project(&[0.0, 2.0]);
        assert_eq!(p.site, 0);
        assert!(p.tie);
        assert_eq!(two.project(&[1.0, 0.0]).distance, 0.0);
        assert!(TargetSet::new(vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn approach_examples() {
        let h = origin();
        assert_eq!(approach(&[3.0, 0.0], &h, 1.0), vec![2.0, 0.0]);
        assert_eq!(approach(&[0.5, 0.0], &h, 1.0), vec![0.0, 0.0]);
        assert_eq!(approach(&[0.5, 0.7], &h, 0.0), vec![0.5, 0.7]);
    }

    #[test]
    fn image_membership_radial() {
        let h = origin();
        let a = SetSpec::annulus(vec![0.0, 0.0], 2.0, 3.0);
        assert!(tdelta_image_membership(&[1.5, 0.0], &h, 1.0, &a).unwrap());
        assert!(!tdelta_image_membership(&[2.5, 0.0], &h, 1.0, &a).unwrap());
        assert_eq!(tdelta_image_membership(&[0.0, 0.0], &h, 1.0, &a), Err(Error::OnTargetSet));
    }

    #[test]
    fn contraction_equality_and_collinear() {
        let h = origin();
        let rep = contraction_check(&h, 1.0, &[(vec![2.0, 0.0], vec![0.0, 2.0])]);
        assert!(rep.passed);
        assert!((rep.get("worst_ratio").unwrap() - 0.5).abs() < 1e-15);
        let rep = contraction_check(&h, 1.0, &[(vec![2.0, 0.0], vec![3.0, 0.0])]);
        assert!(rep.passed);
        assert_eq!(rep.get("worst_ratio").unwrap(), 1.0);
        let rep = contraction_check(&h, 1.0, &[(vec![0.5, 0.0], vec![3.0, 0.0])]);
        assert_eq!((rep.evaluated, rep.skipped), (0, 1));
    }

    #[test]
    fn derivative_saturates_on_a_circle() {
        let h = origin();
        let rep = derivative_check(&h, &[1.0, 0.0], &[0.0, 1.0], 1.0, &[1e-2, 1e-3, 1e-4], None).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!((rep.get("slope").unwrap() + rep.get("f0").unwrap()).abs() < 1e-9);
        let rep = derivative_check(&h, &[1.0, 0.0], &[2.0, 0.0], 1.0, &[1e-2], None).unwrap();
        assert!(rep.get("slope").unwrap().abs() < 1e-12);
        assert!(derivative_check(&h, &[0.5, 0.0], &[2.0, 0.0], 1.0, &[1e-2], None)
            .unwrap_err()
            .is_hypothesis_violation());
    }

    #[test]
    fn k_max_examples() {
        assert_eq!(k_max(1.0, 0.1).unwrap(), 4);
        assert_eq!(k_max(0.3, 0.1).unwrap(), 1);
        assert_eq!(k_max(1.0, 0.05).unwrap(), 9);
        assert!(k_max(1.0, 0.4).is_err());
    }

    #[test]
    fn classify_examples() {
        let h = origin();
        let thin = SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.9, 1.1);
        let c = ak_classify(&[1.0, 0.0], &thin, &h, 1.0, 0.1).unwrap();
        assert_eq!(c.label, AkLabel::Class(0));
        assert_eq!(c.trail.len(), 2);
        let wide = SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.3, 1.1);
        let c = ak_classify(&[1.0, 0.0], &wide, &h, 1.0, 0.1).unwrap();
        assert_eq!(c.label, AkLabel::Class(3));
        assert_eq!(c.trail.len(), 5);
        let c = ak_classify(&[0.45, 0.0], &wide, &h, 1.0, 0.1).unwrap();
        assert_eq!(c.label, AkLabel::InsideCollar);
        // 0.45 = T³(1.05), and 1.05 is a class-3 point.
        assert_eq!(c.piece, Piece::Chain { k: 3, step: 3 });
        assert!((c.trail[0][0] - 1.05).abs() < 1e-12);
    }

    #[test]
    fn collar_point_without_chain_is_star() {
        let h = origin();
        let a = SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.3, 0.6);
        let c = ak_classify(&[0.5, 0.0], &a, &h, 1.0, 0.1).unwrap();
        assert_eq!((c.label, c.piece), (AkLabel::InsideCollar, Piece::Star));
    }

    #[test]
    fn tee_examples() {
        let h = origin();
        let a = SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.9, 1.1);
        let collar = SetSpec::annulus(vec![0.0, 0.0], 0.5, 1.1);
        assert!(tee_membership(&[0.7, 0.0], &collar, &h, 1.0, 0.1).unwrap());
        assert!(tee_membership(&[0.85, 0.0], &a, &h, 1.0, 0.1).unwrap());
        assert!(!tee_membership(&[1.05, 0.0], &a, &h, 1.0, 0.1).unwrap());
    }
}

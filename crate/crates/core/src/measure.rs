//! Monte Carlo volumes and the measure-shrinking checks: the approach-map
//! volume bound, the annulus ratio, the radial coarea identity and the
//! one-step bound for the set operation `𝒯`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::approach::{ak_classify, tdelta_image_membership, tee_membership, AkLabel, Piece, TargetSet};
use crate::error::{Error, Result};
use crate::exec::{Executor, Membership, Sequential};
use crate::math;
use crate::report::CheckReport;
use crate::rng::{SampleStream, SplitStream};
use crate::sets::{BoundingBox, SetSpec};

/// Redraws allowed for one sample whose point lands on the target set.
pub const MAX_RETRIES: u32 = 16;

/// Samples used to measure `R = inf_A d(·, H)`.
pub const R_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub bbox: BoundingBox,
}

impl VolumeEstimate {
    fn from_hits(hits: u64, samples: u64, seed: u64, bbox: &BoundingBox) -> Self {
        let vol = bbox.volume();
        let p = hits as f64 / samples as f64;
        Self {
            estimate: vol * p,
            std_error: vol * math::sqrt(p * (1.0 - p) / samples as f64),
            samples,
            hits,
            seed,
            bbox: bbox.clone(),
        }
    }
}

/// Hits among the sample indices in `range`. Sample `i` is redrawn (next
/// attempt) while the oracle reports [`Error::OnTargetSet`].
pub fn count_hits_range(membership: &Membership<'_>, bbox: &BoundingBox, seed: u64, range: Range<u64>) -> Result<u64> {
    let stream = SampleStream::new(seed);
    let mut point = vec![0.0; bbox.dim()];
    let mut hits = 0;
    'samples: for i in range {
        for attempt in 0..MAX_RETRIES {
            stream.point(i, attempt, bbox, &mut point);
            match membership(&point) {
                Ok(inside) => {
                    hits += inside as u64;
                    continue 'samples;
                }
                Err(Error::OnTargetSet) => {}
                Err(e) => return Err(e),
            }
        }
        return Err(Error::RetriesExhausted { index: i });
    }
    Ok(hits)
}

pub fn mc_volume(membership: &Membership<'_>, bbox: &BoundingBox, n: u64, seed: u64) -> Result<VolumeEstimate> {
    mc_volume_with(&Sequential, membership, bbox, n, seed)
}

/// Hit fraction times box volume, with binomial standard error.
pub fn mc_volume_with<E: Executor + ?Sized>(
    exec: &E,
    membership: &Membership<'_>,
    bbox: &BoundingBox,
    n: u64,
    seed: u64,
) -> Result<VolumeEstimate> {
    if n == 0 {
        return Err(Error::param("Monte Carlo needs at least one sample"));
    }
    let hits = exec.count_hits(membership, bbox, n, seed)?;
    Ok(VolumeEstimate::from_hits(hits, n, seed, bbox))
}

/// `((R−Δ+ε)^d − (R−Δ)^d) / ((R+ε)^d − R^d)`: the volume ratio of an
/// ε-thick shell at radius `R` and its `T_Δ` image for a single-site `H`.
pub fn annulus_ratio_exact(d: usize, r: f64, delta: f64, eps: f64) -> Result<f64> {
    if d == 0 || !(delta >= 0.0) || !(delta <= r) || !(eps > 0.0) {
        return Err(Error::param(format!(
            "need d ≥ 1, 0 ≤ Δ ≤ R and ε > 0 (d = {d}, R = {r}, Δ = {delta}, ε = {eps})"
        )));
    }
    let p = |x: f64| math::powi(x, d as i32);
    Ok((p(r - delta + eps) - p(r - delta)) / (p(r + eps) - p(r)))
}

/// `((R−Δ)/R)^{d−1}`, the ε → 0 limit of [`annulus_ratio_exact`].
pub fn shrink_factor(d: usize, r: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    math::powi((r - delta) / r, d as i32 - 1)
}

/// Draws `count` points of `a` by rejection from `bbox`.
pub fn sample_inside(a: &SetSpec, bbox: &BoundingBox, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut rng = SplitStream::new(seed, u64::MAX);
    let mut out = Vec::with_capacity(count);
    let budget = 1000 * count as u64 + 1000;
    let mut tries = 0;
    while out.len() < count {
        if tries == budget {
            return Err(Error::param("set appears to be empty within its bounding box"));
        }
        tries += 1;
        let p: Vec<f64> = (0..bbox.dim()).map(|k| rng.uniform(bbox.min[k], bbox.max[k])).collect();
        if a.contains(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Inf of `d(·, H)` over `A`, estimated from interior samples pushed to
/// the boundary: each sample is bisected toward its nearest site, keeping
/// the last point still in `A`.
pub fn measure_inf_distance(a: &SetSpec, h: &TargetSet, samples: usize, seed: u64) -> Result<f64> {
    let bbox = a.bounding_box().ok_or_else(|| Error::param("set must be bounded"))?;
    let mut best = f64::INFINITY;
    for y in sample_inside(a, &bbox, samples, seed)? {
        let p = h.site(h.project(&y).site).to_vec();
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let at = |s: f64| -> Vec<f64> { y.iter().zip(&p).map(|(a, b)| a + s * (b - a)).collect() };
        if a.contains(&p) {
            return Ok(0.0);
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if a.contains(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(h.distance(&at(lo)));
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm2Config {
    pub samples: u64,
    pub seed: u64,
    /// Use this `R` instead of measuring it.
    pub pinned_r: Option<f64>,
}

impl Default for Thm2Config {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0, pinned_r: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thm2Report {
    pub target: TargetSet,
    pub set: SetSpec,
    pub delta: f64,
    pub r: f64,
    pub r_pinned: bool,
    pub volume: VolumeEstimate,
    pub image_volume: VolumeEstimate,
    pub ratio: f64,
    pub ratio_sigma: f64,
    /// `((R−Δ)/R)^{d−1}`
    pub bound: f64,
    /// `(ratio − bound)/σ`; negative values quantify a shortfall.
    pub z: f64,
    pub passed: bool,
}

pub fn thm2_check(h: &TargetSet, a: &SetSpec, delta: f64, config: Thm2Config) -> Result<Thm2Report> {
    thm2_check_with(&Sequential, h, a, delta, config)
}

/// `Leb(T_Δ A) ≥ ((R−Δ)/R)^{d−1} Leb(A)` by Monte Carlo on both sides, with
/// a 3σ allowance on the ratio.
pub fn thm2_check_with<E: Executor + ?Sized>(
    exec: &E,
    h: &TargetSet,
    a: &SetSpec,
    delta: f64,
    config: Thm2Config,
) -> Result<Thm2Report> {
    a.validate()?;
    let d = h.dim();
    if a.dim() != Some(d) {
        return Err(Error::DimensionMismatch { expected: d, found: a.dim().unwrap_or(0) });
    }
    if !(delta >= 0.0) {
        return Err(Error::param("Δ must be nonnegative"));
    }
    let bbox = a.bounding_box().ok_or_else(|| Error::param("set must be bounded"))?;
    let r = match config.pinned_r {
        Some(r) => r,
        None => measure_inf_distance(a, h, R_SAMPLES, config.seed)?,
    };
    if r < delta {
        return Err(Error::hypothesis(format!("need R ≥ Δ, measured R = {r}, Δ = {delta}")));
    }
    let inside = |x: &[f64]| Ok(a.contains(x));
    let image = |x: &[f64]| tdelta_image_membership(x, h, delta, a);
    let volume = mc_volume_with(exec, &inside, &bbox, config.samples, config.seed)?;
    let image_volume = mc_volume_with(exec, &image, &bbox.expand(delta), config.samples, config.seed)?;
    if volume.hits == 0 {
        return Err(Error::param("no sample hit the set"));
    }
    let ratio = image_volume.estimate / volume.estimate;
    let ratio_sigma = ratio_sigma(&volume, &image_volume);
    let bound = shrink_factor(d, r, delta);
    let z = if ratio_sigma > 0.0 {
        (ratio - bound) / ratio_sigma
    } else if ratio >= bound {
        0.0
    } else {
        f64::NEG_INFINITY
    };
    Ok(Thm2Report {
        target: h.clone(),
        set: a.clone(),
        delta,
        r,
        r_pinned: config.pinned_r.is_some(),
        passed: ratio >= bound - 3.0 * ratio_sigma,
        volume,
        image_volume,
        ratio,
        ratio_sigma,
        bound,
        z,
    })
}

fn ratio_sigma(den: &VolumeEstimate, num: &VolumeEstimate) -> f64 {
    if num.estimate == 0.0 {
        return num.std_error / den.estimate;
    }
    let ratio = num.estimate / den.estimate;
    let rel = |v: &VolumeEstimate| v.std_error / v.estimate;
    ratio * math::sqrt(rel(num) * rel(num) + rel(den) * rel(den))
}

/// Per-radius slice data from [`coarea_check_radial`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub t: f64,
    /// Estimated length of `{x ∈ A : |x − p| = t}`.
    pub length: f64,
    pub hits: u64,
    pub samples: u64,
}

/// `n + 1` equally spaced radii from 0 to the farthest bounding-box corner.
pub fn coarea_radii(a: &SetSpec, center: &[f64], n: usize) -> Result<Vec<f64>> {
    let bbox = a.bounding_box().ok_or_else(|| Error::param("set must be bounded"))?;
    let mut far = 0.0f64;
    for corner in 0..(1usize << bbox.dim()) {
        let c: Vec<f64> =
            (0..bbox.dim()).map(|k| if corner >> k & 1 == 1 { bbox.max[k] } else { bbox.min[k] }).collect();
        far = far.max(math::dist(&c, center));
    }
    Ok((0..=n).map(|i| far * i as f64 / n as f64).collect())
}

/// `Leb(A) = ∫ H¹({x ∈ A : d(x, H) = t}) dt` for a single-site `H` in the
/// plane. Slice lengths come from random angles, the `t`-integral from the
/// trapezoid rule; the left side is [`mc_volume`].
///
/// Passes when the two sides agree within 3 combined standard errors or
/// within 1% relative.
pub fn coarea_check_radial<E: Executor + ?Sized>(
    exec: &E,
    a: &SetSpec,
    h: &TargetSet,
    radii: &[f64],
    angular_samples: u64,
    volume_samples: u64,
    seed: u64,
) -> Result<(CheckReport, Vec<Slice>)> {
    if h.len() != 1 || h.dim() != 2 {
        return Err(Error::param("the radial coarea check needs a single site in the plane"));
    }
    if radii.len() < 2 || radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] < 0.0 {
        return Err(Error::param("radii must be increasing, nonnegative and at least two"));
    }
    if angular_samples == 0 {
        return Err(Error::param("need at least one angular sample"));
    }
    let p = h.site(0);
    let mut slices = Vec::with_capacity(radii.len());
    for (i, &t) in radii.iter().enumerate() {
        let mut rng = SplitStream::new(seed, i as u64 + 1);
        let mut hits = 0;
        for _ in 0..angular_samples {
            let (s, c) = math::sin_cos(2.0 * core::f64::consts::PI * rng.next_f64());
            hits += a.contains(&[p[0] + t * c, p[1] + t * s]) as u64;
        }
        let frac = hits as f64 / angular_samples as f64;
        slices.push(Slice { t, length: 2.0 * core::f64::consts::PI * t * frac, hits, samples: angular_samples });
    }
    let mut integral = 0.0;
    let mut variance = 0.0;
    let mut weights = vec![0.0; slices.len()];
    for k in 0..slices.len() - 1 {
        let w = 0.5 * (slices[k + 1].t - slices[k].t);
        weights[k] += w;
        weights[k + 1] += w;
    }
    for (s, w) in slices.iter().zip(&weights) {
        integral += w * s.length;
        let q = s.hits as f64 / s.samples as f64;
        let sd = 2.0 * core::f64::consts::PI * s.t * math::sqrt(q * (1.0 - q) / s.samples as f64);
        variance += w * w * sd * sd;
    }
    let bbox = a.bounding_box().ok_or_else(|| Error::param("set must be bounded"))?;
    let inside = |x: &[f64]| Ok(a.contains(x));
    let volume = mc_volume_with(exec, &inside, &bbox, volume_samples, seed)?;
    let sigma = math::sqrt(variance + volume.std_error * volume.std_error);
    let diff = math::abs(integral - volume.estimate);
    let relative = if volume.estimate > 0.0 { diff / volume.estimate } else { diff };
    let mut report = CheckReport::new("coarea", diff, (3.0 * sigma).max(0.01 * volume.estimate)).with_sigma(sigma);
    report.evaluated = slices.len() as u64;
    report.passed = diff <= 3.0 * sigma || relative <= 0.01;
    report.violations = (!report.passed) as u64;
    let report = report
        .detail("slice_integral", integral)
        .detail("volume", volume.estimate)
        .detail("volume_std_error", volume.std_error)
        .detail("relative_difference", relative);
    Ok((report, slices))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma3Config {
    pub samples: u64,
    pub seed: u64,
    /// Points of `A` used to verify `A ⊆ H^{(r+δ)}` and to tally classes.
    pub probe_samples: usize,
}

impl Default for Lemma3Config {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0, probe_samples: 10_000 }
    }
}

/// `Leb(𝒯A) ≥ (1 − 2dδ/(r−δ)) Leb(A)` by Monte Carlo, 3σ allowance.
/// Details carry per-class counts of the probe points.
pub fn lemma3_ratio_check<E: Executor + ?Sized>(
    exec: &E,
    a: &SetSpec,
    h: &TargetSet,
    r: f64,
    delta: f64,
    config: Lemma3Config,
) -> Result<CheckReport> {
    let d = h.dim();
    let limit = r / (2 * d + 1) as f64;
    if !(delta > 0.0 && delta < limit) {
        return Err(Error::hypothesis(format!("need 0 < δ < r/(2d+1) = {limit}, got δ = {delta}")));
    }
    a.validate()?;
    let bbox = a.bounding_box().ok_or_else(|| Error::param("set must be bounded"))?;
    let probes = sample_inside(a, &bbox, config.probe_samples, config.seed)?;
    let k_cap = crate::approach::k_max(r, delta)? as usize;
    let mut classes = vec![0u64; k_cap + 1];
    let (mut collar, mut star, mut chained) = (0u64, 0u64, 0u64);
    for x in &probes {
        if h.distance(x) >= r + delta {
            return Err(Error::hypothesis("set is not inside the (r+δ)-collar of H"));
        }
        let class = ak_classify(x, a, h, r, delta)?;
        match class.label {
            AkLabel::Class(k) => classes[k as usize] += 1,
            AkLabel::InsideCollar => collar += 1,
        }
        match class.piece {
            Piece::Star => star += 1,
            Piece::Chain { .. } => chained += 1,
        }
    }
    let inside = |x: &[f64]| Ok(a.contains(x));
    let tee = |x: &[f64]| tee_membership(x, a, h, r, delta);
    let volume = mc_volume_with(exec, &inside, &bbox, config.samples, config.seed)?;
    let image = mc_volume_with(exec, &tee, &bbox.expand(2.0 * delta), config.samples, config.seed)?;
    if volume.hits == 0 {
        return Err(Error::param("no sample hit the set"));
    }
    let ratio = image.estimate / volume.estimate;
    let sigma = ratio_sigma(&volume, &image);
    let factor = 1.0 - d as f64 * 2.0 * delta / (r - delta);
    // Stored so that `measured ≤ bound` is the passing direction.
    let mut report = CheckReport::new("lemma3", factor, ratio + 3.0 * sigma).with_sigma(sigma);
    report.evaluated = config.samples;
    report.passed = ratio >= factor - 3.0 * sigma;
    report.violations = (!report.passed) as u64;
    let mut report = report
        .detail("ratio", ratio)
        .detail("factor", factor)
        .detail("z", if sigma > 0.0 { (ratio - factor) / sigma } else { 0.0 })
        .detail("volume", volume.estimate)
        .detail("image_volume", image.estimate)
        .detail("inside_collar", collar as f64)
        .detail("chained", chained as f64)
        .detail("star", star as f64);
    for (k, n) in classes.iter().enumerate() {
        report = report.detail(format!("class_{k}"), *n as f64);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> BoundingBox {
        BoundingBox::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn empty_and_full() {
        let b = unit_box();
        let none = mc_volume(&|_: &[f64]| Ok(false), &b, 1000, 1).unwrap();
        assert_eq!(none.estimate, 0.0);
        let all = mc_volume(&|_: &[f64]| Ok(true), &b, 1000, 1).unwrap();
        assert_eq!(all.estimate, 1.0);
        assert_eq!(all.std_error, 0.0);
    }

    #[test]
    fn annulus_ratio_examples() {
        let v = annulus_ratio_exact(2, 1.0, 0.5, 1.0).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(annulus_ratio_exact(3, 1.0, 0.0, 0.3).unwrap(), 1.0);
        let v = annulus_ratio_exact(2, 1.0, 0.5, 1e-6).unwrap();
        assert!((v - 0.5).abs() < 1e-5);
        assert!(annulus_ratio_exact(2, 1.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn retries_then_gives_up() {
        let b = unit_box();
        let err = mc_volume(&|_: &[f64]| Err(Error::OnTargetSet), &b, 3, 0).unwrap_err();
        assert_eq!(err, Error::RetriesExhausted { index: 0 });
    }

    #[test]
    fn inf_distance_of_annulus() {
        let h = TargetSet::new(vec![vec![0.0, 0.0]]).unwrap();
        let a = SetSpec::annulus(vec![0.0, 0.0], 1.0, 1.2);
        let r = measure_inf_distance(&a, &h, 200, 3).unwrap();
        assert!((1.0..1.0 + 1e-9).contains(&r), "{r}");
    }
}

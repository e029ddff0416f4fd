//! Runs one check from a kind plus merged parameters.

use std::path::Path;

use oscillation_core::approach::{contraction_check, decomposition_check, derivative_check};
use oscillation_core::generate;
use oscillation_core::measure::{coarea_check_radial, coarea_radii, lemma3_ratio_check, thm2_check_with};
use oscillation_core::measure::{Lemma3Config, Thm2Config};
use oscillation_core::morphology::oscillation;
use oscillation_core::rng::SplitStream;
use oscillation_core::seminorm::{
    continuity_modulus_check, open_closed_agreement, osc_integral_sweep_with, pushforward_density_check,
    sandwich_check, thm1_check_alphas, Thm1Config,
};
use oscillation_core::{BallMode, CheckReport, Executor, GridFunction, SetSpec, SweepGrid, TargetSet};
use serde_json::{json, Value};

use crate::format::{load_grid_function, FormatError, LoadedGrid};
use crate::report::{coarea_csv, sweep_csv, Report, Verdict};
use crate::spec::{CheckKind, InputSpec, Params};

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("missing parameter `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] oscillation_core::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl CheckError {
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, CheckError::Core(e) if e.is_hypothesis_violation())
    }
}

pub type Result<T> = std::result::Result<T, CheckError>;

/// What a check needs besides its parameters.
pub struct Context<'a> {
    pub exec: &'a dyn Executor,
    pub input: Option<&'a InputSpec>,
    pub grid: Option<&'a LoadedGrid>,
    pub seed: u64,
    pub base_dir: &'a Path,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

fn need<T: Clone>(value: &Option<T>, name: &'static str) -> Result<T> {
    value.clone().ok_or(CheckError::Missing(name))
}

/// Builds the grid function described by `input`.
pub fn generate_input(input: &InputSpec, seed: u64, base_dir: &Path) -> Result<LoadedGrid> {
    let grid = match input {
        InputSpec::Constant { shape, spacing, origin, value } => {
            let origin = origin.clone().unwrap_or_else(|| vec![0.0; shape.len()]);
            generate::constant(shape.clone(), *spacing, origin, *value)?
        }
        InputSpec::Lattice { length, r, h } => generate::lattice_indicator(*length, *r, *h)?,
        InputSpec::Disconnected { n, h } => generate::disconnected(*n, *h)?,
        InputSpec::Random { shape, spacing, seed: own, .. } => {
            let (field, domain) = input.field().expect("random input");
            generate::random_field(shape.clone(), *spacing, field, domain, own.unwrap_or(seed))?
        }
        InputSpec::File { path } => return Ok(load_grid_function(&base_dir.join(path))?),
    };
    Ok(LoadedGrid { grid, c: 1.0 })
}

/// The same input sampled at half the spacing.
fn refined_input(input: &InputSpec) -> Result<InputSpec> {
    match input {
        InputSpec::Lattice { length, r, h } => Ok(InputSpec::Lattice { length: *length, r: *r, h: h / 2.0 }),
        InputSpec::Disconnected { n, h } => Ok(InputSpec::Disconnected { n: *n, h: h / 2.0 }),
        _ => Err(CheckError::Config("refinement is only defined for lattice and disconnected inputs".into())),
    }
}

/// Uniform points in `[lo, hi]^dim`.
fn random_points(rng: &mut SplitStream, count: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| rng.uniform(lo, hi)).collect()).collect()
}

fn target(params: &Params, rng: &mut SplitStream, default_sites: usize) -> Result<TargetSet> {
    match (&params.target, params.sites) {
        (Some(t), _) => Ok(t.build()?),
        (None, n) => Ok(TargetSet::new(random_points(rng, n.unwrap_or(default_sites), 2, -1.0, 1.0))?),
    }
}

/// Worst case over the parts: measured is the maximum, counters add up and
/// each detail keeps its minimum.
fn merge(check: &str, parts: &[CheckReport]) -> CheckReport {
    let bound = parts.first().map_or(0.0, |p| p.bound);
    let mut out = CheckReport::new(check, f64::NEG_INFINITY, bound);
    for p in parts {
        out.measured = out.measured.max(p.measured);
        out.violations += p.violations;
        out.evaluated += p.evaluated;
        out.skipped += p.skipped;
        for (k, v) in &p.details {
            match out.details.iter_mut().find(|(key, _)| key == k) {
                Some((_, slot)) => *slot = slot.min(*v),
                None => out.details.push((k.clone(), *v)),
            }
        }
    }
    if out.evaluated == 0 {
        out.measured = 0.0;
    }
    out.slack = out.bound - out.measured;
    out.passed = out.violations == 0;
    out
}

fn mode(params: &Params) -> BallMode {
    params.mode.unwrap_or_default().into()
}

fn sweep_for(params: &Params, g: &GridFunction) -> Result<SweepGrid> {
    Ok(match &params.sweep {
        Some(s) => s.build()?,
        None => SweepGrid::default_for(g)?,
    })
}

pub fn run_check(kind: CheckKind, params: &Params, ctx: &Context<'_>) -> Result<Outcome> {
    let mut inputs = serde_json::to_value(params).expect("params serialize");
    inputs["seed"] = json!(ctx.seed);
    let grid = if kind.needs_grid() {
        Some(ctx.grid.ok_or_else(|| CheckError::Config(format!("check `{kind}` needs an input grid function")))?)
    } else {
        None
    };
    let c = params.c.or(grid.map(|g| g.c)).unwrap_or(1.0);
    let plain = |report: CheckReport| Outcome { report: Report::from_check(inputs.clone(), &report), csv: None };
    match kind {
        CheckKind::Sweep | CheckKind::Seminorm => {
            let g = &grid.unwrap().grid;
            let alpha = params.alpha.unwrap_or(1.0);
            let mode = mode(params);
            let target = match params.r {
                Some(r) => oscillation(g, r, mode)?,
                None => g.clone(),
            };
            let sweep = sweep_for(params, &target)?;
            let rep = osc_integral_sweep_with(ctx.exec, &target, mode, &sweep, alpha, c)?;
            let mut report = match params.expected {
                Some(expected) => {
                    let tolerance = params.tolerance.unwrap_or(0.15);
                    let gap = (rep.estimate - expected).abs() / expected.abs();
                    let mut r = CheckReport::new(kind.name(), gap, tolerance);
                    r.evaluated = 1;
                    r.passed = gap <= tolerance;
                    r.violations = (!r.passed) as u64;
                    r.detail("expected", expected)
                }
                None => {
                    let mut r = CheckReport::new(kind.name(), rep.estimate, f64::INFINITY);
                    r.evaluated = 1;
                    r
                }
            };
            report = report
                .detail("estimate", rep.estimate)
                .detail("argmax_delta", rep.argmax_delta)
                .detail("below_resolution", rep.below_resolution as u8 as f64);
            let csv = (kind == CheckKind::Sweep).then(|| sweep_csv(&rep));
            Ok(Outcome { report: Report::from_check(inputs, &report), csv })
        }
        CheckKind::Thm1 => {
            let g = &grid.unwrap().grid;
            let r = need(&params.r, "r")?;
            let alpha = params.alpha.unwrap_or(1.0);
            let config = Thm1Config {
                tolerance: params.tolerance.unwrap_or(oscillation_core::seminorm::DEFAULT_THM1_TOLERANCE),
                hull_override: params.hull_volume,
            };
            let sweep = sweep_for(params, g)?;
            let rep = thm1_check_alphas(ctx.exec, g, r, &[alpha], mode(params), &sweep, c, config)?.remove(0);
            let mut check = CheckReport::new("thm1", rep.lhs, rep.rhs)
                .detail("M", rep.m)
                .detail("hull_volume", rep.hull.volume)
                .detail("argmax_delta", rep.sweep.argmax_delta);
            check.evaluated = rep.sweep.entries.len() as u64;
            check.passed = rep.passed;
            check.violations = (!rep.passed) as u64;
            Ok(Outcome { report: Report::from_check(inputs, &check), csv: Some(sweep_csv(&rep.sweep)) })
        }
        CheckKind::Sandwich => {
            let g = &grid.unwrap().grid;
            Ok(plain(sandwich_check(g, need(&params.r, "r")?, need(&params.delta, "delta")?, mode(params))?))
        }
        CheckKind::Density => {
            let g = &grid.unwrap().grid;
            let (r, delta) = (need(&params.r, "r")?, need(&params.delta, "delta")?);
            let rep = pushforward_density_check(g, r, delta, params.intervals.as_deref(), c, ctx.seed)?;
            let mut check = CheckReport::new("density", rep.max_violation, 0.0)
                .detail("constant", rep.constant)
                .detail("eps_stat", rep.eps_stat);
            check.evaluated = rep.intervals.len() as u64;
            check.violations = rep.violations;
            check.passed = rep.passed;
            Ok(plain(check))
        }
        CheckKind::Continuity => {
            let g = &grid.unwrap().grid;
            Ok(plain(continuity_modulus_check(g, need(&params.r, "r")?, need(&params.delta, "delta")?, c)?))
        }
        CheckKind::OpenClosed => {
            let g = &grid.unwrap().grid;
            let r = need(&params.r, "r")?;
            let refined = match (params.refine.unwrap_or(false), ctx.input) {
                (false, _) => None,
                (true, Some(input)) => Some(generate_input(&refined_input(input)?, ctx.seed, ctx.base_dir)?.grid),
                (true, None) => return Err(CheckError::Config("refinement needs a generator input".into())),
            };
            let sweep = sweep_for(params, g)?;
            let alpha = params.alpha.unwrap_or(1.0);
            let tolerance = params.tolerance.unwrap_or(0.02);
            Ok(plain(open_closed_agreement(g, refined.as_ref(), r, &sweep, alpha, c, tolerance)?))
        }
        CheckKind::Contraction => {
            let mut rng = SplitStream::new(ctx.seed, 1);
            let h = target(params, &mut rng, 16)?;
            let count = params.count.unwrap_or(100_000);
            let dim = h.dim();
            let parts: Vec<CheckReport> = (0..count)
                .map(|_| {
                    let mut ends = random_points(&mut rng, 2, dim, -3.0, 3.0);
                    let pair = (ends.remove(0), ends.remove(0));
                    let big_r = h.distance(&pair.0).min(h.distance(&pair.1));
                    let delta = params.delta.unwrap_or_else(|| rng.uniform(0.0, big_r));
                    contraction_check(&h, delta, &[pair])
                })
                .collect();
            Ok(plain(merge("contraction", &parts)))
        }
        CheckKind::Derivative => {
            let mut rng = SplitStream::new(ctx.seed, 2);
            let h = target(params, &mut rng, 4)?;
            let count = params.count.unwrap_or(1000);
            let steps = params.steps.clone().unwrap_or_else(|| vec![1e-2, 1e-3, 1e-4]);
            let dim = h.dim();
            let mut parts = Vec::with_capacity(count);
            for _ in 0..count {
                let (x, y, r) = loop {
                    let x = random_points(&mut rng, 1, dim, -3.0, 3.0).remove(0);
                    let y = random_points(&mut rng, 1, dim, -3.0, 3.0).remove(0);
                    let reach = h.distance(&x).min(h.distance(&y));
                    let r = params.r.unwrap_or(reach);
                    if reach >= r && r > 0.05 && x != y {
                        break (x, y, r);
                    }
                };
                parts.push(derivative_check(&h, &x, &y, r, &steps, params.kappa)?);
            }
            Ok(plain(merge("derivative", &parts)))
        }
        CheckKind::Thm2 => {
            let h = need(&params.target, "target")?.build()?;
            let a = SetSpec::from(&need(&params.set, "set")?);
            let config =
                Thm2Config { samples: params.samples.unwrap_or(1_000_000), seed: ctx.seed, pinned_r: params.pinned_r };
            let rep = thm2_check_with(ctx.exec, &h, &a, need(&params.delta, "delta")?, config)?;
            let mut check = CheckReport::new("thm2", rep.ratio, rep.bound)
                .with_sigma(rep.ratio_sigma)
                .detail("z", rep.z)
                .detail("R", rep.r)
                .detail("volume", rep.volume.estimate)
                .detail("image_volume", rep.image_volume.estimate);
            // Larger is better here, so slack is measured minus bound.
            check.slack = rep.ratio - rep.bound;
            check.evaluated = rep.volume.samples;
            check.passed = rep.passed;
            check.violations = (!rep.passed) as u64;
            Ok(plain(check))
        }
        CheckKind::Lemma3 => {
            let h = need(&params.target, "target")?.build()?;
            let a = SetSpec::from(&need(&params.set, "set")?);
            let config = Lemma3Config {
                samples: params.samples.unwrap_or(1_000_000),
                seed: ctx.seed,
                probe_samples: params.probe_samples.unwrap_or(10_000),
            };
            let rep =
                lemma3_ratio_check(ctx.exec, &a, &h, need(&params.r, "r")?, need(&params.delta, "delta")?, config)?;
            Ok(plain(rep))
        }
        CheckKind::Coarea => {
            let h = need(&params.target, "target")?.build()?;
            let a = SetSpec::from(&need(&params.set, "set")?);
            let radii = coarea_radii(&a, h.site(0), params.radii.unwrap_or(200))?;
            let (rep, slices) = coarea_check_radial(
                ctx.exec,
                &a,
                &h,
                &radii,
                params.angular_samples.unwrap_or(20_000),
                params.samples.unwrap_or(1_000_000),
                ctx.seed,
            )?;
            Ok(Outcome { report: Report::from_check(inputs, &rep), csv: Some(coarea_csv(&slices)) })
        }
        CheckKind::Decomposition => {
            let h = need(&params.target, "target")?.build()?;
            let a = SetSpec::from(&need(&params.set, "set")?);
            let n = params.count.unwrap_or(10_000);
            Ok(plain(decomposition_check(&a, &h, need(&params.r, "r")?, need(&params.delta, "delta")?, n, ctx.seed)?))
        }
    }
}

/// Report for a check that raised an error instead of a verdict.
pub fn error_report(kind: CheckKind, params: &Params, seed: u64, err: &CheckError) -> Report {
    let mut inputs: Value = serde_json::to_value(params).expect("params serialize");
    inputs["seed"] = json!(seed);
    let verdict = if err.is_hypothesis_violation() { Verdict::HypothesisError } else { Verdict::Error };
    Report::failed(kind.name(), inputs, verdict, err.to_string())
}

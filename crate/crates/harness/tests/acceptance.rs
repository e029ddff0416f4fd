//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use oscillation_core::approach::{decomposition_check, k_max};
use oscillation_core::generate::{disconnected, lattice_indicator, random_field, Domain, Field};
use oscillation_core::measure::{annulus_ratio_exact, coarea_check_radial, coarea_radii, thm2_check_with, Thm2Config};
use oscillation_core::morphology::oscillation;
use oscillation_core::rng::SplitStream;
use oscillation_core::seminorm::{
    continuity_modulus_check, open_closed_agreement, osc_integral_sweep_with, pushforward_density_check,
    sandwich_check, thm1_check_alphas, Thm1Config,
};
use oscillation_core::{BallMode, GridFunction, SetSpec, SweepGrid, TargetSet};
use oscillation_harness::checks::{run_check, Context};
use oscillation_harness::scenario::{load_scenario, run_to_dir};
use oscillation_harness::spec::{CheckKind, Params};
use oscillation_harness::{examples, Parallel};

const BATTERY_SIZE: usize = 50;
const BATTERY_BUDGET: Duration = Duration::from_secs(300);
const LATTICE_INTEGRAL_TOL: f64 = 0.10;
const SEMINORM_TOL: f64 = 0.15;
const ARGMAX_FACTOR: f64 = 2.0;
const SIGMAS: f64 = 3.0;
const ANNULUS_SAMPLES: u64 = 1_000_000;
const ANNULUS_EPSILONS: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
const CONTRACTION_PAIRS: usize = 100_000;
const DERIVATIVE_CONFIGS: usize = 1000;
const SANDWICH_FUNCTIONS: u64 = 200;
const DENSITY_SCENARIOS: u64 = 20;
const DENSITY_INTERVALS: usize = 100;
const KMAX_PAIRS: usize = 10_000;
const TRAIL_POINTS: usize = 10_000;
const COAREA_TOL: f64 = 0.01;
const OPEN_CLOSED_TOL: f64 = 0.02;
const REFINEMENT_RATIO: f64 = 0.5;
const REFINEMENT_TOL: f64 = 0.25;

/// Lattice example: `L = 1`, `r = 1/64`, `h = 1/1024`.
const LATTICE_R: f64 = 1.0 / 64.0;
const LATTICE_H: f64 = 1.0 / 1024.0;

type Outcome = Result<String, String>;
type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn verdict(ok: bool, message: String) -> Outcome {
    if ok {
        Ok(message)
    } else {
        Err(message)
    }
}

fn geometric(min: f64, max: f64) -> SweepGrid {
    SweepGrid::geometric(min, max, 2f64.powf(0.25)).unwrap()
}

struct Member {
    grid: GridFunction,
    label: String,
}

/// 50 seeded functions: odd members 2-D (64 to 128 cells per axis), even
/// members 1-D (128 to 512 cells), alternating smooth and uniform fields
/// on box and ball domains.
fn battery() -> Vec<Member> {
    (0..BATTERY_SIZE)
        .map(|i| {
            let seed = 1000 + i as u64;
            let shape = if i % 2 == 0 {
                vec![[128, 256, 384, 512][(i / 2) % 4]]
            } else {
                vec![[64, 80, 96, 112, 128][(i / 2) % 5]; 2]
            };
            let field = if i % 4 < 2 { Field::Smooth { modes: 5, max_frequency: 8.0 } } else { Field::Uniform };
            let domain = if i % 3 == 0 { Domain::Ball } else { Domain::Box };
            let h = 1.0 / (shape[0] - 1) as f64;
            let label = format!("#{i} {:?} {field:?} {domain:?}", shape);
            Member { grid: random_field(shape, h, field, domain, seed).unwrap(), label }
        })
        .collect()
}

fn thm1_battery(exec: &Parallel, battery: &[Member]) -> Outcome {
    let start = Instant::now();
    let (mut evaluated, mut violations, mut min_slack) = (0, 0, f64::INFINITY);
    let mut first = None;
    for m in battery {
        let h = m.grid.spacing();
        let sweep = SweepGrid::default_for(&m.grid).map_err(|e| e.to_string())?;
        for r in [8.0 * h, 16.0 * h, 32.0 * h] {
            let reports =
                thm1_check_alphas(exec, &m.grid, r, &[0.5, 1.0], BallMode::Open, &sweep, 1.0, Thm1Config::default())
                    .map_err(|e| format!("{}: {e}", m.label))?;
            for rep in reports {
                evaluated += 1;
                min_slack = min_slack.min(rep.slack / rep.rhs);
                if !rep.passed {
                    violations += 1;
                    first.get_or_insert(format!("{} r={r} α={}: {} > {}", m.label, rep.alpha, rep.lhs, rep.rhs));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        violations == 0 && elapsed <= BATTERY_BUDGET,
        format!(
            "{evaluated} (f, r, α) cases, {violations} violations, min relative slack {min_slack:.3}, {:.1}s (budget {}s){}",
            elapsed.as_secs_f64(),
            BATTERY_BUDGET.as_secs(),
            first.map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    )
}

fn continuity_battery(battery: &[Member]) -> Outcome {
    let (mut evaluated, mut violations, mut worst) = (0, 0, f64::NEG_INFINITY);
    for m in battery {
        let h = m.grid.spacing();
        let d = m.grid.dim();
        for r in [8.0 * h, 16.0 * h, 32.0 * h] {
            let delta = r / (2 * (2 * d + 1)) as f64;
            let rep = continuity_modulus_check(&m.grid, r, delta, 1.0).map_err(|e| format!("{}: {e}", m.label))?;
            evaluated += 1;
            violations += rep.violations;
            worst = worst.max(rep.measured / rep.bound);
        }
    }
    verdict(
        violations == 0,
        format!("{evaluated} (f, r) cases, {violations} violations, worst measured/bound {worst:.3}"),
    )
}

fn lattice_sweep(exec: &Parallel) -> Outcome {
    let f = lattice_indicator(1.0, LATTICE_R, LATTICE_H).unwrap();
    let g = oscillation(&f, LATTICE_R, BallMode::Open).unwrap();
    let rep = osc_integral_sweep_with(exec, &g, BallMode::Open, &geometric(12.0 * LATTICE_H, 1.0), 1.0, 1.0).unwrap();
    let worst = rep
        .entries
        .iter()
        .map(|e| {
            let law = (e.delta / LATTICE_R).min(1.0);
            (e.integral - law).abs() / law
        })
        .fold(0.0, f64::max);
    let expected = 1.0 / LATTICE_R;
    let gap = (rep.estimate - expected).abs() / expected;
    let argmax_ok = rep.argmax_delta >= LATTICE_R / ARGMAX_FACTOR && rep.argmax_delta <= LATTICE_R * ARGMAX_FACTOR;
    verdict(
        worst <= LATTICE_INTEGRAL_TOL && gap <= SEMINORM_TOL && argmax_ok,
        format!(
            "max |I/law − 1| = {worst:.3} over {} δ, estimate {:.2} vs {expected} ({:.1}%), argmax δ = {:.4} (r = {LATTICE_R})",
            rep.entries.len(),
            rep.estimate,
            100.0 * gap,
            rep.argmax_delta
        ),
    )
}

fn disconnected_seminorm(exec: &Parallel) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [4u32, 8] {
        let f = disconnected(n, 1.0 / 64.0).unwrap();
        let r = n as f64;
        let g = oscillation(&f, r, BallMode::Open).unwrap();
        let sweep = SweepGrid::default_for(&g).unwrap();
        for alpha in [0.5, 1.0] {
            let est = osc_integral_sweep_with(exec, &g, BallMode::Open, &sweep, alpha, 1.0).unwrap().estimate;
            ok &= (est - 4.0).abs() <= SEMINORM_TOL * 4.0;
            parts.push(format!("N={n} α={alpha}: {est:.3}"));
        }
    }
    verdict(ok, format!("{} (target μ(D) = 4)", parts.join(", ")))
}

fn annulus_ratio(exec: &Parallel) -> Outcome {
    let h = TargetSet::new(vec![vec![0.0, 0.0]]).unwrap();
    let config = Thm2Config { samples: ANNULUS_SAMPLES, seed: 20, pinned_r: None };
    let mut ratios = Vec::new();
    let mut within = true;
    for eps in ANNULUS_EPSILONS {
        let a = SetSpec::annulus(vec![0.0, 0.0], 1.0, 1.0 + eps);
        let rep = thm2_check_with(exec, &h, &a, 0.5, config).map_err(|e| e.to_string())?;
        let exact = annulus_ratio_exact(2, 1.0, 0.5, eps).unwrap();
        within &= (rep.ratio - exact).abs() <= SIGMAS * rep.ratio_sigma && rep.ratio >= 0.5;
        ratios.push((eps, rep.ratio, exact, rep.ratio_sigma));
    }
    let monotone = ratios.windows(2).all(|w| w[1].1 < w[0].1);
    let (_, ratio, exact, sigma) = ratios[1];
    let sweep: Vec<String> = ratios.iter().map(|(e, r, _, _)| format!("{e}:{r:.4}")).collect();
    verdict(
        within && monotone,
        format!(
            "ε=0.2 ratio {ratio:.4} ± {sigma:.4} vs closed form {exact:.4}; ε-sweep {} (limit 0.5, monotone: {monotone})",
            sweep.join(" ")
        ),
    )
}

fn harness_check(exec: &Parallel, kind: CheckKind, params: Params, seed: u64) -> Outcome {
    let ctx = Context { exec, input: None, grid: None, seed, base_dir: Path::new(".") };
    let out = run_check(kind, &params, &ctx).map_err(|e| e.to_string())?;
    let r = out.report;
    let details: Vec<String> =
        r.details.iter().map(|(k, v)| format!("{k}={}", v.map_or("null".into(), |v| format!("{v:.4e}")))).collect();
    verdict(
        r.passed() && r.violations == 0,
        format!("{} evaluated, {} skipped, {} violations; {}", r.evaluated, r.skipped, r.violations, details.join(" ")),
    )
}

fn sandwich_battery() -> Outcome {
    let mut rng = SplitStream::new(77, 0);
    let (mut cells, mut violations) = (0u64, 0u64);
    for i in 0..SANDWICH_FUNCTIONS {
        let shape = if i % 2 == 0 { vec![64 + rng.below(193) as usize] } else { vec![20 + rng.below(29) as usize; 2] };
        let h = 1.0 / (shape[0] - 1) as f64;
        let field = if i % 3 == 0 { Field::Smooth { modes: 4, max_frequency: 6.0 } } else { Field::Uniform };
        let domain = if i % 4 == 1 { Domain::Ball } else { Domain::Box };
        let g = random_field(shape, h, field, domain, 500 + i).unwrap();
        let r = rng.uniform(3.0, 10.0) * h;
        let delta = rng.uniform(0.05, 0.95) * r;
        for mode in [BallMode::Open, BallMode::Closed] {
            let rep = sandwich_check(&g, r, delta, mode).map_err(|e| e.to_string())?;
            cells += rep.evaluated;
            violations += rep.violations;
        }
    }
    verdict(
        violations == 0,
        format!("{SANDWICH_FUNCTIONS} functions × 2 modes, {cells} cell comparisons, {violations} violations (zero tolerance)"),
    )
}

fn density_battery() -> Outcome {
    let (mut intervals, mut violations, mut worst) = (0usize, 0u64, f64::NEG_INFINITY);
    for seed in 0..DENSITY_SCENARIOS {
        let smooth = Field::Smooth { modes: 5, max_frequency: 8.0 };
        let (g, r, delta) = if seed % 2 == 0 {
            (random_field(vec![64, 64], 1.0 / 63.0, smooth, Domain::Box, 300 + seed).unwrap(), 0.2, 0.02)
        } else {
            (random_field(vec![512], 1.0 / 511.0, smooth, Domain::Box, 300 + seed).unwrap(), 0.1, 0.02)
        };
        let rep = pushforward_density_check(&g, r, delta, None, 1.0, seed).map_err(|e| e.to_string())?;
        intervals += rep.intervals.len();
        violations += rep.violations;
        worst = worst.max(rep.max_violation);
    }
    verdict(
        violations == 0 && intervals == DENSITY_INTERVALS * DENSITY_SCENARIOS as usize,
        format!(
            "{DENSITY_SCENARIOS} scenarios, {intervals} intervals, {violations} violations, max excess {worst:.3e}"
        ),
    )
}

/// `(m, e)` with `x = m · 2^e` exactly.
fn decompose(x: f64) -> (u128, i32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1 << 52) - 1);
    if exp == 0 {
        (frac as u128, -1074)
    } else {
        ((frac | (1 << 52)) as u128, exp - 1075)
    }
}

/// Both characterizations in exact integer arithmetic: `⌊(r − δ)/(2δ)⌋`
/// and the largest `k` with `(2k+1)δ ≤ r`.
fn exact_k(r: f64, delta: f64) -> (u64, u64) {
    let (mr, er) = decompose(r);
    let (md, ed) = decompose(delta);
    let low = er.min(ed);
    let (r, d) = (mr << (er - low), md << (ed - low));
    let by_floor = ((r - d) / (2 * d)) as u64;
    let mut by_max = 0u64;
    while (2 * (by_max as u128 + 1) + 1) * d <= r {
        by_max += 1;
    }
    (by_floor, by_max)
}

fn kmax_and_trails() -> Outcome {
    let mut rng = SplitStream::new(91, 0);
    let mut mismatches = 0;
    let mut boundary = 0;
    for i in 0..KMAX_PAIRS {
        let (r, delta) = if i % 10 == 0 {
            // Exact boundary r = (2k+1)δ with dyadic δ.
            boundary += 1;
            let delta = 2f64.powi(-(1 + rng.below(12) as i32));
            ((2 * (1 + rng.below(200)) + 1) as f64 * delta, delta)
        } else {
            let r = rng.uniform(0.1, 10.0);
            (r, r * rng.uniform(1e-3, 1.0) / 3.0)
        };
        let (a, b) = exact_k(r, delta);
        match k_max(r, delta) {
            Ok(k) if a == b && k as u64 == a => {}
            _ => mismatches += 1,
        }
    }
    let disc = |x: f64, y: f64, rad: f64| SetSpec::Ball { center: vec![x, y], radius: rad, closed: false };
    let one = TargetSet::new(vec![vec![0.0, 0.0]]).unwrap();
    let two = TargetSet::new(vec![vec![0.0, 0.0], vec![2.5, 0.4]]).unwrap();
    let three = TargetSet::new(vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 3.0]]).unwrap();
    let scenarios = [
        (SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.3, 1.05), one.clone(), 1.0, 0.05),
        (SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.3, 1.05), two.clone(), 1.0, 0.05),
        (
            SetSpec::Intersection(vec![
                SetSpec::annulus_closed_open(vec![0.0, 0.0], 0.2, 1.05),
                SetSpec::HalfSpace { normal: vec![1.0, 0.3], offset: -0.4 },
            ]),
            two,
            1.0,
            0.05,
        ),
        (SetSpec::Box { min: vec![1.0, 1.0], max: vec![1.4, 1.6] }, three, 2.2, 0.1),
        (SetSpec::Union(vec![disc(0.5, 0.2, 0.3), disc(-0.4, -0.3, 0.35)]), one, 0.9, 0.06),
    ];
    let per = TRAIL_POINTS / scenarios.len();
    let (mut points, mut violations) = (0, 0);
    for (i, (a, h, r, delta)) in scenarios.iter().enumerate() {
        let rep = decomposition_check(a, h, *r, *delta, per, 40 + i as u64).map_err(|e| e.to_string())?;
        points += rep.evaluated;
        violations += rep.violations;
    }
    verdict(
        mismatches == 0 && violations == 0,
        format!(
            "k_max: {KMAX_PAIRS} pairs ({boundary} exact boundary), {mismatches} mismatches; trails: {points} points in 5 scenarios, {violations} inconsistent"
        ),
    )
}

fn coarea(exec: &Parallel) -> Outcome {
    let h = TargetSet::new(vec![vec![0.0, 0.0]]).unwrap();
    let annulus = SetSpec::annulus(vec![0.0, 0.0], 1.0, 2.0);
    let square =
        SetSpec::Intersection(vec![annulus.clone(), SetSpec::Box { min: vec![-1.5, -1.5], max: vec![1.5, 1.5] }]);
    let run = |set: &SetSpec, seed| {
        let radii = coarea_radii(set, &[0.0, 0.0], 2000).unwrap();
        coarea_check_radial(exec, set, &h, &radii, 2000, 1_000_000, seed).map(|(rep, _)| rep)
    };
    let full = run(&annulus, 5).map_err(|e| e.to_string())?;
    let exact = 3.0 * PI;
    let (integral, volume) = (full.get("slice_integral").unwrap(), full.get("volume").unwrap());
    let full_ok = (integral - exact).abs() <= COAREA_TOL * exact
        && (volume - exact).abs() <= COAREA_TOL * exact
        && (integral - volume).abs() <= COAREA_TOL * volume;
    let cut = run(&square, 6).map_err(|e| e.to_string())?;
    let sigma = cut.sigma.unwrap();
    let diff = cut.get("slice_integral").unwrap() - cut.get("volume").unwrap();
    verdict(
        full_ok && diff.abs() <= SIGMAS * sigma,
        format!(
            "annulus: slices {integral:.4}, volume {volume:.4}, exact {exact:.4}; annulus∩square: difference {diff:.4} vs 3σ = {:.4}",
            SIGMAS * sigma
        ),
    )
}

fn open_closed() -> Outcome {
    let f = lattice_indicator(1.0, LATTICE_R, LATTICE_H).unwrap();
    let fine = lattice_indicator(1.0, LATTICE_R, LATTICE_H / 2.0).unwrap();
    let sweep = geometric(12.0 * LATTICE_H, 1.0);
    let rep = open_closed_agreement(&f, Some(&fine), LATTICE_R, &sweep, 1.0, 1.0, OPEN_CLOSED_TOL)
        .map_err(|e| e.to_string())?;
    let ratio = rep.get("refinement_ratio").unwrap();
    let halves = (ratio - REFINEMENT_RATIO).abs() <= REFINEMENT_TOL * REFINEMENT_RATIO;
    verdict(
        rep.passed && halves,
        format!(
            "seminorms open {:.3} / closed {:.3} (gap {:.2}%), differing fraction {:.4} → {:.4} (ratio {ratio:.3})",
            rep.get("seminorm_open").unwrap(),
            rep.get("seminorm_closed").unwrap(),
            100.0 * rep.measured,
            rep.get("differing_fraction").unwrap(),
            rep.get("differing_fraction_refined").unwrap()
        ),
    )
}

fn reproducibility() -> Outcome {
    let dir = Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"));
    let mut scenarios =
        vec![(examples::lattice(1.0), dir.to_path_buf()), (examples::disconnected(4, 0.5), dir.to_path_buf())];
    for name in ["thm2-annulus", "approach-map", "density-large-step"] {
        scenarios
            .push((load_scenario(&dir.join(format!("{name}.json"))).map_err(|e| e.to_string())?, dir.to_path_buf()));
    }
    let (mut files, mut differing) = (0, Vec::new());
    for (scenario, base) in &scenarios {
        let outs: Vec<_> = [1, 4, 1]
            .iter()
            .map(|&threads| {
                let tmp = tempfile::tempdir().unwrap();
                let exec = Parallel::new(Some(threads)).unwrap();
                run_to_dir(scenario, base, tmp.path(), &exec, threads).unwrap();
                tmp
            })
            .collect();
        let mut names: Vec<_> = std::fs::read_dir(outs[0].path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .filter(|n| n != "metadata.json")
            .collect();
        names.sort();
        for name in names {
            files += 1;
            let reference = std::fs::read(outs[0].path().join(&name)).unwrap();
            if outs[1..].iter().any(|o| std::fs::read(o.path().join(&name)).ok().as_ref() != Some(&reference)) {
                differing.push(format!("{}/{}", scenario.name, name.to_string_lossy()));
            }
        }
    }
    verdict(
        differing.is_empty(),
        format!(
            "{} scenarios, {files} files compared across 1/4/1 threads, differing: {:?}",
            scenarios.len(),
            differing
        ),
    )
}

fn main() -> ExitCode {
    let exec = Parallel::new(None).expect("thread pool");
    let battery = battery();
    let contraction = Params { count: Some(CONTRACTION_PAIRS), sites: Some(16), ..Params::default() };
    let derivative =
        Params { count: Some(DERIVATIVE_CONFIGS), steps: Some(vec![1e-2, 1e-3, 1e-4]), ..Params::default() };
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("seminorm bound battery", Box::new(|| thm1_battery(&exec, &battery))),
        ("lattice example", Box::new(|| lattice_sweep(&exec))),
        ("disconnected example", Box::new(|| disconnected_seminorm(&exec))),
        ("annulus measure ratio", Box::new(|| annulus_ratio(&exec))),
        ("pairwise contraction", Box::new(|| harness_check(&exec, CheckKind::Contraction, contraction.clone(), 5))),
        ("distance derivative", Box::new(|| harness_check(&exec, CheckKind::Derivative, derivative.clone(), 6))),
        ("sandwich", Box::new(sandwich_battery)),
        ("push-forward density", Box::new(density_battery)),
        ("continuity modulus", Box::new(|| continuity_battery(&battery))),
        ("step count and trails", Box::new(kmax_and_trails)),
        ("coarea identity", Box::new(|| coarea(&exec))),
        ("open versus closed balls", Box::new(open_closed)),
        ("reproducibility", Box::new(reproducibility)),
    ];
    let mut failures = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, message) = match criterion() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failures += 1;
                ("FAIL", m)
            }
        };
        println!("[{tag}] {:>2} {name}: {message} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

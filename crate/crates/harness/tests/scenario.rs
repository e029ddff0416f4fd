use std::path::Path;

use oscillation_core::Sequential;
use oscillation_harness::checks::generate_input;
use oscillation_harness::report::Verdict;
use oscillation_harness::scenario::{load_scenario, run, run_to_dir, Status};
use oscillation_harness::spec::{CheckKind, CheckSpec, Expect, InputSpec, Params, Scenario, SetDto, TargetDto};
use oscillation_harness::{examples, Parallel};

fn scenarios_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

#[test]
fn lattice_generator_marks_seventeen_cells() {
    let input = InputSpec::Lattice { length: 1.0, r: 1.0 / 64.0, h: 1.0 / 1024.0 };
    let g = generate_input(&input, 0, Path::new(".")).unwrap().grid;
    let marked: Vec<usize> = (0..g.len()).filter(|&i| g.values()[i] == 1.0).collect();
    assert_eq!(marked.len(), 17);
    assert!(marked.iter().enumerate().all(|(k, &i)| i == 64 * k));
}

#[test]
fn disconnected_generator_has_three_components() {
    let g = generate_input(&InputSpec::Disconnected { n: 4, h: 1.0 / 64.0 }, 0, Path::new(".")).unwrap().grid;
    let mut runs = Vec::new();
    let mut len = 0;
    for &m in g.mask() {
        if m {
            len += 1;
        } else if len > 0 {
            runs.push(len);
            len = 0;
        }
    }
    runs.push(len);
    assert_eq!(runs, vec![129, 1, 129]);
}

#[test]
fn constant_generator_fills_every_cell() {
    let input = InputSpec::Constant { shape: vec![3, 4], spacing: 0.5, origin: None, value: 3.0 };
    let g = generate_input(&input, 0, Path::new(".")).unwrap().grid;
    assert!(g.values().iter().all(|&v| v == 3.0));
}

#[test]
fn bundled_scenarios_pass() {
    for name in ["lattice-1d", "thm2-annulus", "density-large-step", "approach-map"] {
        let path = scenarios_dir().join(format!("{name}.json"));
        let scenario = load_scenario(&path).unwrap();
        let out = run(&scenario, scenarios_dir(), &Sequential).unwrap();
        assert_eq!(out.status, Status::Pass, "{name}: {:#?}", out.summary);
    }
}

#[test]
fn annulus_ratio_is_near_closed_form() {
    let scenario = load_scenario(&scenarios_dir().join("thm2-annulus.json")).unwrap();
    let out = run(&scenario, scenarios_dir(), &Sequential).unwrap();
    let ratio = out.reports[0].measured.unwrap();
    let sigma = out.reports[0].sigma.unwrap();
    assert!((ratio - 0.24 / 0.44).abs() <= 3.0 * sigma, "{ratio} ± {sigma}");
}

fn density_scenario(expect: Expect) -> Scenario {
    Scenario {
        name: "density".into(),
        input: Some(InputSpec::Random {
            shape: vec![16, 16],
            spacing: 0.0625,
            field: Default::default(),
            modes: 5,
            max_frequency: 8.0,
            domain: Default::default(),
            seed: None,
        }),
        params: Params::default(),
        checks: vec![CheckSpec {
            check: CheckKind::Density,
            expect,
            params: Params { r: Some(0.2), delta: Some(0.1), ..Params::default() },
        }],
        seed: 1,
        output: None,
    }
}

#[test]
fn undeclared_hypothesis_error_is_a_configuration_error() {
    let out = run(&density_scenario(Expect::Pass), Path::new("."), &Sequential).unwrap();
    assert_eq!(out.status, Status::ConfigError);
    assert_eq!(out.reports[0].verdict, Verdict::HypothesisError);
    assert!(out.reports[0].error.as_deref().unwrap().contains("outside lemma hypothesis"));
    let declared = run(&density_scenario(Expect::HypothesisError), Path::new("."), &Sequential).unwrap();
    assert_eq!(declared.status, Status::Pass);
}

#[test]
fn failing_check_gives_failure_status() {
    let mut scenario = examples::disconnected(4, 1.0);
    scenario.checks[0].params.expected = Some(8.0);
    let out = run(&scenario, Path::new("."), &Sequential).unwrap();
    assert_eq!(out.status, Status::Fail);
    scenario.checks[0].expect = Expect::Fail;
    assert_eq!(run(&scenario, Path::new("."), &Sequential).unwrap().status, Status::Pass);
}

#[test]
fn missing_parameter_is_a_configuration_error() {
    let scenario = Scenario {
        name: "no-delta".into(),
        input: None,
        params: Params {
            target: Some(TargetDto { sites: vec![vec![0.0, 0.0]] }),
            set: Some(SetDto::Ball { center: vec![2.0, 0.0], radius: 0.5, closed: false }),
            ..Params::default()
        },
        checks: vec![CheckSpec { check: CheckKind::Thm2, expect: Expect::Pass, params: Params::default() }],
        seed: 0,
        output: None,
    };
    let out = run(&scenario, Path::new("."), &Sequential).unwrap();
    assert_eq!(out.status, Status::ConfigError);
    assert!(out.reports[0].error.as_deref().unwrap().contains("delta"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let scenario = load_scenario(&scenarios_dir().join("approach-map.json")).unwrap();
    let dirs: Vec<_> = [1, 3].iter().map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, threads) in dirs.iter().zip([1, 3]) {
        let exec = Parallel::new(Some(threads)).unwrap();
        run_to_dir(&scenario, scenarios_dir(), dir.path(), &exec, threads).unwrap();
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .filter(|n| n != "metadata.json")
        .collect();
    names.sort();
    assert!(names.len() > 5);
    for name in names {
        let a = std::fs::read(dirs[0].path().join(&name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(&name)).unwrap();
        assert_eq!(a, b, "{name:?}");
    }
}

#[test]
fn scenario_params_round_trip_through_json() {
    let scenario = examples::lattice(0.5);
    let text = serde_json::to_string(&scenario).unwrap();
    let back: Scenario = serde_json::from_str(&text).unwrap();
    assert_eq!(back, scenario);
}

#[test]
fn unknown_fields_are_rejected() {
    let text = r#"{"name": "x", "checks": [{"check": "thm1", "radius": 1.0}]}"#;
    assert!(serde_json::from_str::<Scenario>(text).is_err());
    let text = r#"{"name": "x", "checks": [{"check": "nonsense"}]}"#;
    assert!(serde_json::from_str::<Scenario>(text).is_err());
}

//! Scenario execution and output files.
//!
//! Report files depend only on the scenario and its seed. Wall-clock times
//! and the thread count go to `metadata.json`, which is the one file allowed
//! to differ between runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use oscillation_core::Executor;
use serde::Serialize;

use crate::checks::{error_report, generate_input, run_check, CheckError, Context};
use crate::format::LoadedGrid;
use crate::report::{Report, Verdict};
use crate::spec::{Expect, Scenario};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {cause}")]
    Read { path: PathBuf, cause: std::io::Error },
    #[error("invalid scenario {path}: {cause}")]
    Parse { path: PathBuf, cause: serde_json::Error },
    #[error("cannot build input: {0}")]
    Input(CheckError),
    #[error("cannot write {path}: {cause}")]
    Write { path: PathBuf, cause: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// A check failed, or a verdict contradicts its declared expectation.
    Fail,
    /// A check raised an error that the scenario did not declare.
    ConfigError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::ConfigError => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryEntry {
    pub check: String,
    pub file: String,
    pub verdict: Verdict,
    pub expected: Expect,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub checks: Vec<SummaryEntry>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: Status,
    pub summary: Summary,
    /// `(file name, contents)` for every report and CSV, in check order.
    pub files: Vec<(String, String)>,
    pub reports: Vec<Report>,
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|cause| ScenarioError::Read { path: path.to_owned(), cause })?;
    serde_json::from_str(&text).map_err(|cause| ScenarioError::Parse { path: path.to_owned(), cause })
}

fn matches(expect: Expect, verdict: Verdict) -> bool {
    matches!(
        (expect, verdict),
        (Expect::Pass, Verdict::Pass)
            | (Expect::Fail, Verdict::Fail)
            | (Expect::HypothesisError, Verdict::HypothesisError)
    )
}

/// Runs every check in declared order. Nothing is written to disk.
pub fn run(scenario: &Scenario, base_dir: &Path, exec: &dyn Executor) -> Result<RunOutput, ScenarioError> {
    let grid: Option<LoadedGrid> = match &scenario.input {
        Some(input) if scenario.checks.iter().any(|c| c.check.needs_grid()) => {
            Some(generate_input(input, scenario.seed, base_dir).map_err(ScenarioError::Input)?)
        }
        _ => None,
    };
    let ctx = Context { exec, input: scenario.input.as_ref(), grid: grid.as_ref(), seed: scenario.seed, base_dir };
    let mut status = Status::Pass;
    let mut files = Vec::new();
    let mut reports = Vec::new();
    let mut entries = Vec::new();
    for (i, spec) in scenario.checks.iter().enumerate() {
        let params = spec.params.merged(&scenario.params);
        let stem = format!("{:02}-{}", i + 1, spec.check);
        let mut report = match run_check(spec.check, &params, &ctx) {
            Ok(outcome) => {
                if let Some(csv) = outcome.csv {
                    files.push((format!("{stem}.csv"), csv));
                }
                outcome.report
            }
            Err(err) => error_report(spec.check, &params, scenario.seed, &err),
        };
        report.expected = Some(spec.expect);
        report.ok = matches(spec.expect, report.verdict);
        if !report.ok {
            let undeclared_error = matches!(report.verdict, Verdict::HypothesisError | Verdict::Error);
            status = match (status, undeclared_error) {
                (Status::ConfigError, _) | (_, true) => Status::ConfigError,
                _ => Status::Fail,
            };
        }
        let file = format!("{stem}.json");
        files.push((file.clone(), report.to_json()));
        entries.push(SummaryEntry {
            check: spec.check.name().to_owned(),
            file,
            verdict: report.verdict,
            expected: spec.expect,
            ok: report.ok,
        });
        reports.push(report);
    }
    let summary = Summary {
        name: scenario.name.clone(),
        seed: scenario.seed,
        verdict: if status == Status::Pass { Verdict::Pass } else { Verdict::Fail },
        checks: entries,
    };
    Ok(RunOutput { status, summary, files, reports })
}

#[derive(Debug, Serialize)]
struct Metadata {
    started_unix: f64,
    finished_unix: f64,
    threads: usize,
    version: &'static str,
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Runs the scenario and writes reports, CSV, `summary.json` and
/// `metadata.json` into `out`.
pub fn run_to_dir(
    scenario: &Scenario,
    base_dir: &Path,
    out: &Path,
    exec: &dyn Executor,
    threads: usize,
) -> Result<RunOutput, ScenarioError> {
    let started = unix_now();
    let output = run(scenario, base_dir, exec)?;
    let write = |name: &str, text: &str| {
        let path = out.join(name);
        fs::write(&path, text).map_err(|cause| ScenarioError::Write { path, cause })
    };
    fs::create_dir_all(out).map_err(|cause| ScenarioError::Write { path: out.to_owned(), cause })?;
    for (name, text) in &output.files {
        write(name, text)?;
    }
    let mut summary = serde_json::to_string_pretty(&output.summary).expect("summary serializes");
    summary.push('\n');
    write("summary.json", &summary)?;
    let meta =
        Metadata { started_unix: started, finished_unix: unix_now(), threads, version: env!("CARGO_PKG_VERSION") };
    write("metadata.json", &serde_json::to_string_pretty(&meta).expect("metadata serializes"))?;
    Ok(output)
}

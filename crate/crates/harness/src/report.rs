//! JSON reports and plot-ready CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use oscillation_core::measure::Slice;
use oscillation_core::seminorm::SweepReport;
use oscillation_core::CheckReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisError,
    Error,
}

/// One check's outcome as written to disk. Non-finite numbers serialize as
/// `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub inputs: Value,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub sigma: Option<f64>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<crate::spec::Expect>,
    /// Whether the verdict matches the declared expectation.
    #[serde(default = "yes")]
    pub ok: bool,
    #[serde(default)]
    pub violations: u64,
    #[serde(default)]
    pub evaluated: u64,
    #[serde(default)]
    pub skipped: u64,
    #[serde(default)]
    pub details: BTreeMap<String, Option<f64>>,
}

fn yes() -> bool {
    true
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl Report {
    pub fn from_check(inputs: Value, c: &CheckReport) -> Self {
        Self {
            check: c.check.clone(),
            inputs,
            measured: finite(c.measured),
            bound: finite(c.bound),
            slack: finite(c.slack),
            sigma: c.sigma.and_then(finite),
            verdict: if c.passed { Verdict::Pass } else { Verdict::Fail },
            error: None,
            expected: None,
            ok: c.passed,
            violations: c.violations,
            evaluated: c.evaluated,
            skipped: c.skipped,
            details: c.details.iter().map(|(k, v)| (k.clone(), finite(*v))).collect(),
        }
    }

    pub fn failed(check: &str, inputs: Value, verdict: Verdict, message: String) -> Self {
        Self {
            check: check.to_owned(),
            inputs,
            measured: None,
            bound: None,
            slack: None,
            sigma: None,
            verdict,
            error: Some(message),
            expected: None,
            ok: false,
            violations: 0,
            evaluated: 0,
            skipped: 0,
            details: BTreeMap::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied().flatten()
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// `delta,I,I_over_delta_alpha`, one row per δ, full round-trip precision.
pub fn sweep_csv(sweep: &SweepReport) -> String {
    let mut out = String::from("delta,I,I_over_delta_alpha\n");
    for e in &sweep.entries {
        writeln!(out, "{:e},{:e},{:e}", e.delta, e.integral, e.ratio).unwrap();
    }
    out
}

/// `t,length,hits,samples`, one row per radius.
pub fn coarea_csv(slices: &[Slice]) -> String {
    let mut out = String::from("t,length,hits,samples\n");
    for s in slices {
        writeln!(out, "{:e},{:e},{},{}", s.t, s.length, s.hits, s.samples).unwrap();
    }
    out
}

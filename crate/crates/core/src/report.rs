//! Pass/fail record shared by every inequality check.

use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of one inequality check.
///
/// `measured` and `bound` are the worst case over everything evaluated, and
/// `slack = bound − measured` (positive when the inequality holds with room).
/// For ratio-type checks where larger is better the caller stores the
/// quantities so that the same sign convention applies.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    /// Combined standard error for statistical checks.
    pub sigma: Option<f64>,
    pub violations: u64,
    pub evaluated: u64,
    /// Items dropped because they fell outside the check's precondition.
    pub skipped: u64,
    pub passed: bool,
    pub details: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            check: check.into(),
            measured,
            bound,
            slack: bound - measured,
            sigma: None,
            violations: 0,
            evaluated: 0,
            skipped: 0,
            passed: true,
            details: Vec::new(),
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = Some(sigma);
        self
    }

    pub fn detail(mut self, key: impl Into<String>, value: f64) -> Self {
        self.details.push((key.into(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

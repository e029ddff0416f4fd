//! Scenario runner, file formats and reports for `oscillation-core`.
//!
//! The `osc` binary is a thin clap front end over [`scenario::run_to_dir`];
//! every subcommand other than `osc osc` builds a [`spec::Scenario`] and
//! runs it.

pub mod checks;
pub mod exec;
pub mod format;
pub mod report;
pub mod scenario;
pub mod spec;

pub use exec::Parallel;

/// Ready-made scenarios for the two worked examples.
pub mod examples {
    use crate::spec::{CheckKind, CheckSpec, Expect, InputSpec, Params, Scenario, SweepDto};

    fn check(kind: CheckKind, params: Params) -> CheckSpec {
        CheckSpec { check: kind, expect: Expect::Pass, params }
    }

    /// Indicator of `[0, 1] ∩ 4rℤ` with `r = 1/64`, `h = 1/1024`.
    ///
    /// The sweep starts at `12h`: below that the cell-center quadrature of
    /// `∫ osc_δ` is dominated by rounding of the ball to whole cells.
    pub fn lattice(alpha: f64) -> Scenario {
        let (r, h) = (1.0 / 64.0, 1.0 / 1024.0);
        let sweep = SweepDto::Geometric { min: 12.0 * h, max: 1.0, ratio: 2f64.powf(0.25) };
        let params = Params { alpha: Some(alpha), sweep: Some(sweep), ..Params::default() };
        Scenario {
            name: "lattice-1d".into(),
            input: Some(InputSpec::Lattice { length: 1.0, r, h }),
            params,
            checks: vec![
                check(
                    CheckKind::Sweep,
                    Params { r: Some(r), expected: Some(r.powf(-alpha)), tolerance: Some(0.15), ..Params::default() },
                ),
                check(CheckKind::Thm1, Params { r: Some(r), ..Params::default() }),
                check(CheckKind::Sandwich, Params { r: Some(r), delta: Some(r / 2.0), ..Params::default() }),
            ],
            seed: 0,
            output: None,
        }
    }

    /// Indicator of `{0}` on `[−N−1, −N+1] ∪ {0} ∪ [N−1, N+1]` with `r = N`.
    pub fn disconnected(n: u32, alpha: f64) -> Scenario {
        let r = n as f64;
        Scenario {
            name: format!("disconnected-{n}"),
            input: Some(InputSpec::Disconnected { n, h: 1.0 / 64.0 }),
            params: Params { alpha: Some(alpha), r: Some(r), ..Params::default() },
            checks: vec![
                check(CheckKind::Seminorm, Params { expected: Some(4.0), tolerance: Some(0.15), ..Params::default() }),
                check(CheckKind::Thm1, Params::default()),
            ],
            seed: 0,
            output: None,
        }
    }
}

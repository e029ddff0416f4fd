//! Ball oscillation operators, the generalized α-Hölder seminorm and the
//! nearest-point approach map, on uniform grids and finite target sets.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports,
//! parallel execution and the command-line front end live in the
//! `oscillation-harness` crate.
//!
//! Module map:
//!
//! - [`grid`]: [`GridFunction`], midpoint integration, convex-hull volume
//!   and the hull extension `f := inf f` outside the domain.
//! - [`morphology`]: open/closed ball stencils, dilation, erosion and the
//!   r-oscillation, with sliding-extremum fast paths for `d ≤ 2`.
//! - [`seminorm`]: δ-sweeps, the seminorm estimator and the inequality
//!   checks built on them.
//! - [`approach`]: projection onto a finite target set, the approach map
//!   `T_Δ`, image membership and the 2δ-step decomposition.
//! - [`measure`]: Monte Carlo volumes and the measure-shrinking checks.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approach;
pub mod error;
pub mod exec;
pub mod generate;
pub mod grid;
pub mod hull;
pub mod math;
pub mod measure;
pub mod morphology;
pub mod report;
pub mod rng;
pub mod seminorm;
pub mod sets;
pub mod sum;

pub use approach::{AkClass, AkLabel, Piece, ProjectionResult, TargetSet};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use grid::GridFunction;
pub use hull::HullInfo;
pub use measure::{Thm2Report, VolumeEstimate};
pub use morphology::{BallMode, BallOffsets};
pub use report::CheckReport;
pub use seminorm::{DensityReport, SweepGrid, SweepReport, Thm1Report};
pub use sets::{BoundingBox, SetSpec};

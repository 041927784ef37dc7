//! Contour-integral eigensolvers for nonlinear eigenvalue problems.
//!
//! Given a holomorphic matrix-valued function `T(z)` and a rectangular
//! region of the complex plane, the solvers in this crate locate every
//! `λ` in the region with `T(λ)x = 0` for some nonzero `x`:
//!
//! * [`sim::run_pmcima`] screens a covering of disks with a ratio
//!   indicator and keeps subdividing flagged disks until they are
//!   smaller than the requested precision, then recovers eigenvectors.
//! * [`beyn::run_pmcimb`] screens the covering once, extracts the
//!   eigenvalues of every flagged disk from two contour moments, and
//!   verifies each candidate by substituting it back into `T`.
//!
//! The crate is `no_std` (it needs `alloc`). Work is dispatched through
//! the [`parallel::Executor`] trait; [`parallel::Sequential`] runs
//! everything on the calling thread, and a threaded executor lives in
//! the `nepcim` companion crate together with file formats and the CLI.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod beyn;
pub mod config;
pub mod contour;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod parallel;
pub mod problem;
pub mod problems;
pub mod rng;
pub mod sim;

pub use num_complex::Complex64;

pub use beyn::{run_pmcimb, verify_eigenvalue, BeynExtraction, MomentPair, Verification};
pub use config::SolverConfig;
pub use contour::{indicator, projection_apply, ProjectionSample, QuadratureNodes, SolveCounter};
pub use error::{Error, Result};
pub use geometry::{cover_rectangle, Disk, Rectangle};
pub use linalg::DenseMatrix;
pub use parallel::{Executor, Sequential};
pub use problem::NepProblem;
pub use sim::{run_pmcima, EigenResult, Method, RunDiagnostics, RunOutput, Warning};

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

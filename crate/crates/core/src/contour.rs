//! Trapezoidal quadrature on circles, the spectral projection of a probe
//! vector, and the ratio indicator built from it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::geometry::Disk;
use crate::linalg::LuFactor;
use crate::problem::NepProblem;
use crate::C64;

/// Equispaced nodes `z_j = c + r·e^{iθ_j}` and weights `r·e^{iθ_j}/N`.
///
/// With these weights `Σ_j w_j g(z_j)` approximates
/// `(1/2πi) ∮ g(z) dz` over the circle.
#[derive(Debug, Clone)]
pub struct QuadratureNodes {
    disk: Disk,
    nodes: Vec<C64>,
    weights: Vec<C64>,
}

impl QuadratureNodes {
    pub fn new(disk: Disk, count: usize) -> Self {
        Self::rotated(disk, count, 0.0)
    }

    /// Rule with every angle advanced by `phase`.
    pub fn rotated(disk: Disk, count: usize, phase: f64) -> Self {
        let c = disk.center();
        let r = disk.radius();
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for j in 0..count {
            let theta = 2.0 * PI * j as f64 / count as f64 + phase;
            let e = C64::new(libm::cos(theta), libm::sin(theta));
            nodes.push(c + e * r);
            weights.push(e * (r / count as f64));
        }
        QuadratureNodes { disk, nodes, weights }
    }

    pub fn disk(&self) -> Disk {
        self.disk
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[C64] {
        &self.weights
    }
}

/// Running count of linear solves issued by the contour kernels.
///
/// One counter is shared by every task of a run; increments are atomic, so
/// the total does not depend on scheduling.
#[derive(Debug, Default)]
pub struct SolveCounter(AtomicU64);

impl SolveCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&self, n: u64) {
        self.0.fetch_add(n, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}

/// Quadrature approximations of `P f` with all nodes and with every
/// second node.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSample {
    /// N-point sum.
    pub full: Vec<C64>,
    /// N/2-point sum over nodes 2, 4, …, N (1-based) with doubled weights.
    pub half: Vec<C64>,
    /// Solves whose matrix was flagged near-singular.
    pub solve_warnings: usize,
    /// Whether the rule had to be rotated by π/N after a singular node.
    pub rotated: bool,
}

/// Factors `T(z)` at a node, counting the attempt.
pub(crate) fn factor_at<P: NepProblem + ?Sized>(problem: &P, z: C64, counter: &SolveCounter) -> Result<LuFactor> {
    counter.add(1);
    LuFactor::factor(problem.evaluate(z))
}

/// Runs `attempt` with the plain rule and, if a node hits an exactly
/// singular matrix, once more with the rule rotated by `π/N`.
pub(crate) fn with_rotation_retry<T>(
    disk: Disk,
    count: usize,
    mut attempt: impl FnMut(&QuadratureNodes, bool) -> Result<T>,
) -> Result<T> {
    match attempt(&QuadratureNodes::new(disk, count), false) {
        Err(Error::SingularSystem { .. }) => attempt(&QuadratureNodes::rotated(disk, count, PI / count as f64), true),
        other => other,
    }
}

/// Approximates the spectral projection `P f` on `disk` with `n_quad`
/// trapezoidal nodes (exactly `n_quad` solves per attempt).
pub fn projection_apply<P: NepProblem + ?Sized>(
    problem: &P,
    disk: Disk,
    f: &[C64],
    n_quad: usize,
    counter: &SolveCounter,
) -> Result<ProjectionSample> {
    let n = problem.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }
    if n_quad < 4 || n_quad % 2 != 0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "projection needs an even node count of at least 4, got {n_quad}"
        )));
    }
    if f.iter().all(|x| x.re == 0.0 && x.im == 0.0) {
        return Err(Error::InvalidConfig("probe vector is zero".into()));
    }
    with_rotation_retry(disk, n_quad, |rule, rotated| {
        let mut full = vec![C64::new(0.0, 0.0); n];
        let mut half = vec![C64::new(0.0, 0.0); n];
        let mut solve_warnings = 0;
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (j, (&z, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
            let lu = factor_at(problem, z, counter)?;
            if lu.near_singular() {
                solve_warnings += 1;
            }
            x.copy_from_slice(f);
            lu.solve_vec_in_place(&mut x);
            for (acc, &xi) in full.iter_mut().zip(&x) {
                *acc += w * xi;
            }
            if j % 2 == 1 {
                let w2 = w * 2.0;
                for (acc, &xi) in half.iter_mut().zip(&x) {
                    *acc += w2 * xi;
                }
            }
        }
        Ok(ProjectionSample { full, half, solve_warnings, rotated })
    })
}

/// `‖full ⊘ half‖₂ / √n`, skipping components whose half-sum is exactly
/// zero. Returns 0 when every half-sum component is zero.
pub fn indicator_from_sample(sample: &ProjectionSample) -> f64 {
    let n = sample.full.len();
    if n == 0 {
        return 0.0;
    }
    let ratios: Vec<C64> = sample
        .full
        .iter()
        .zip(&sample.half)
        .filter(|(_, h)| !(h.re == 0.0 && h.im == 0.0))
        .map(|(f, h)| f / h)
        .collect();
    if ratios.is_empty() {
        return 0.0;
    }
    crate::linalg::norm2(&ratios) / libm::sqrt(n as f64)
}

/// Ratio indicator of `disk`: close to 1 when the disk encloses
/// eigenvalues, small otherwise.
pub fn indicator<P: NepProblem + ?Sized>(
    problem: &P,
    disk: Disk,
    f: &[C64],
    n_quad: usize,
    counter: &SolveCounter,
) -> Result<(f64, ProjectionSample)> {
    let sample = projection_apply(problem, disk, f, n_quad, counter)?;
    Ok((indicator_from_sample(&sample), sample))
}

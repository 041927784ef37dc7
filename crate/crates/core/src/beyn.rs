//! The moment driver: screen the covering once, extract the eigenvalues of
//! every flagged disk from two contour moments, keep those inside the
//! disk's inscribed square, and verify each one against `T`.

use alloc::vec::Vec;

use crate::config::SolverConfig;
use crate::contour::{factor_at, with_rotation_retry, SolveCounter};
use crate::error::{Error, Result};
use crate::geometry::Disk;
use crate::linalg::{dense_eig, normalize, smallest_eigenpair, thin_svd, DenseMatrix};
use crate::parallel::{Executor, Sequential};
use crate::problem::NepProblem;
use crate::rng::ProbeRng;
use crate::sim::{check_inputs, screen_disks, EigenResult, Method, RunDiagnostics, RunOutput, Warning};
use crate::C64;

/// Trapezoidal approximations of `(1/2πi)∮ T(z)⁻¹V dz` and
/// `(1/2πi)∮ z T(z)⁻¹V dz` on one disk.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPair {
    pub c0: DenseMatrix,
    pub c1: DenseMatrix,
    pub disk: Disk,
    pub n_quad: usize,
    pub solve_warnings: usize,
    pub rotated: bool,
}

/// Computes both moments with `n_quad` nodes, one factorization per node.
pub fn beyn_moments<P: NepProblem + ?Sized>(
    problem: &P,
    disk: Disk,
    v: &DenseMatrix,
    n_quad: usize,
    counter: &SolveCounter,
) -> Result<MomentPair> {
    beyn_moments_with(problem, disk, v, n_quad, counter, &Sequential)
}

/// As [`beyn_moments`], solving the node systems through `executor`.
/// The sums are accumulated in node order afterwards, so the result does
/// not depend on the executor.
pub fn beyn_moments_with<P, E>(
    problem: &P,
    disk: Disk,
    v: &DenseMatrix,
    n_quad: usize,
    counter: &SolveCounter,
    executor: &E,
) -> Result<MomentPair>
where
    P: NepProblem + ?Sized,
    E: Executor + ?Sized,
{
    let n = problem.dim();
    if v.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.rows() });
    }
    if v.cols() == 0 || v.cols() > n {
        return Err(Error::InvalidConfig(alloc::format!(
            "probe block must have between 1 and {n} columns, got {}",
            v.cols()
        )));
    }
    if n_quad < 4 {
        return Err(Error::InvalidConfig(alloc::format!("moments need at least 4 nodes, got {n_quad}")));
    }
    with_rotation_retry(disk, n_quad, |rule, rotated| {
        let solved = executor.map(rule.nodes(), |_, &z| {
            let lu = factor_at(problem, z, counter)?;
            let mut x = v.clone();
            lu.solve_in_place(&mut x);
            Ok((x, lu.near_singular()))
        });
        let mut c0 = DenseMatrix::zeros(n, v.cols());
        let mut c1 = DenseMatrix::zeros(n, v.cols());
        let mut solve_warnings = 0;
        for ((x, &z), &w) in solved.into_iter().zip(rule.nodes()).zip(rule.weights()) {
            let (x, near_singular) = x?;
            solve_warnings += usize::from(near_singular);
            c0.add_scaled(w, &x);
            c1.add_scaled(w * z, &x);
        }
        Ok(MomentPair { c0, c1, disk, n_quad, solve_warnings, rotated })
    })
}

/// Eigenvalues and eigenvectors recovered from a [`MomentPair`].
#[derive(Debug, Clone, PartialEq)]
pub struct BeynExtraction {
    /// Number of singular values above the threshold.
    pub rank: usize,
    /// All singular values of `c0`, nonincreasing.
    pub singular_values: Vec<f64>,
    pub eigenvalues: Vec<C64>,
    /// Unit columns `V₀ s_j`, one per eigenvalue.
    pub eigenvectors: DenseMatrix,
}

impl BeynExtraction {
    /// Truncated SVD of `c0`, then the eigenpairs of
    /// `D = V₀ᴴ c1 W₀ Σ₀⁻¹`. Never reports saturation.
    pub fn compute(m: &MomentPair, tol_svd: f64) -> Result<Self> {
        let svd = thin_svd(&m.c0)?;
        let p = svd.rank_above(tol_svd);
        let n = m.c0.rows();
        if p == 0 {
            return Ok(BeynExtraction {
                rank: 0,
                singular_values: svd.sigma,
                eigenvalues: Vec::new(),
                eigenvectors: DenseMatrix::zeros(n, 0),
            });
        }
        let v0 = svd.u.columns(0..p);
        let mut w0 = svd.w.columns(0..p);
        for j in 0..p {
            let inv = 1.0 / svd.sigma[j];
            w0.col_mut(j).iter_mut().for_each(|x| *x *= inv);
        }
        let d = v0.adjoint().matmul(&m.c1).matmul(&w0);
        let eig = dense_eig(&d)?;
        let mut vectors = v0.matmul(&eig.vectors);
        for j in 0..p {
            normalize(vectors.col_mut(j));
        }
        Ok(BeynExtraction { rank: p, singular_values: svd.sigma, eigenvalues: eig.values, eigenvectors: vectors })
    }

    /// Whether every probe direction carried signal above the threshold.
    pub fn is_saturated(&self) -> bool {
        !self.singular_values.is_empty() && self.rank == self.singular_values.len()
    }
}

/// Extracts eigenpairs, failing with [`Error::RankSaturated`] when no
/// singular value falls below `tol_svd`.
pub fn beyn_extract(m: &MomentPair, tol_svd: f64) -> Result<BeynExtraction> {
    let ex = BeynExtraction::compute(m, tol_svd)?;
    if ex.is_saturated() {
        return Err(Error::RankSaturated { rank: ex.rank });
    }
    Ok(ex)
}

/// Outcome of substituting a candidate back into `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub accepted: bool,
    /// `|λ⁰|`, the magnitude of the smallest eigenvalue of `T(λ)`; NaN if
    /// it could not be computed.
    pub residual: f64,
    pub error: Option<Error>,
}

/// Accepts `lambda` when the smallest eigenvalue of `T(lambda)` is below
/// `config.verify_tol` in magnitude. Numerical failure rejects.
pub fn verify_eigenvalue<P: NepProblem + ?Sized>(problem: &P, lambda: C64, config: &SolverConfig) -> Verification {
    match smallest_eigenpair(&problem.evaluate(lambda), config.shift) {
        Ok(pair) => {
            let residual = pair.value.norm();
            Verification { accepted: residual < config.verify_tol, residual, error: None }
        }
        Err(error) => Verification { accepted: false, residual: f64::NAN, error: Some(error) },
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    disk: usize,
    value: C64,
    vector: Vec<C64>,
    inside: bool,
}

/// Runs the moment driver on `covering`.
///
/// Step 1 screens every disk with `n_quad_sim` nodes. Step 2 computes the
/// moments of each flagged disk with `n_quad_beyn` nodes, extracts its
/// eigenvalues, and keeps those strictly inside the disk's inscribed
/// square. Step 3 verifies the kept values. Values that every disk
/// rejected but that lie within `merge_tol` of a square edge are verified
/// as well and admitted when no kept value is nearby. The output is
/// ordered by disk index, then real and imaginary part, with duplicates
/// within `merge_tol` removed.
pub fn run_pmcimb<P, E>(problem: &P, covering: &[Disk], config: &SolverConfig, executor: &E) -> Result<RunOutput>
where
    P: NepProblem + ?Sized,
    E: Executor + ?Sized,
{
    check_inputs(problem, covering, config)?;
    let n = problem.dim();
    let probes = config.probe_count.min(n);
    let mut rng = ProbeRng::new(config.rng_seed);
    let f = rng.unit_vector(n);
    let v = rng.probe_matrix(n, probes);
    let counter = SolveCounter::new();
    let mut diagnostics = RunDiagnostics { levels: 1, ..Default::default() };

    // Step 1
    diagnostics.screening =
        screen_disks(problem, covering, &f, config.n_quad_sim, executor, &counter, &mut diagnostics.warnings);
    let flagged: Vec<usize> =
        (0..covering.len()).filter(|&i| diagnostics.screening[i].flagged(config.tol_ind)).collect();
    diagnostics.survivors_per_level.push(flagged.len());

    // Step 2
    let extractions = executor.map(&flagged, |_, &i| {
        let m = if config.inner_parallel {
            beyn_moments_with(problem, covering[i], &v, config.n_quad_beyn, &counter, executor)?
        } else {
            beyn_moments(problem, covering[i], &v, config.n_quad_beyn, &counter)?
        };
        let ex = BeynExtraction::compute(&m, config.tol_svd)?;
        Ok((m.solve_warnings, m.rotated, ex))
    });
    let mut candidates = Vec::new();
    for (&i, res) in flagged.iter().zip(extractions) {
        let disk = covering[i];
        let (center, radius) = (disk.center(), disk.radius());
        let (solve_warnings, rotated, ex) = match res {
            Ok(r) => r,
            Err(error) => {
                diagnostics.warnings.push(Warning::DiskFailed { center, radius, error });
                continue;
            }
        };
        if rotated {
            diagnostics.warnings.push(Warning::RotatedRule { center, radius });
        }
        if solve_warnings > 0 {
            diagnostics.warnings.push(Warning::IllConditioned { center, radius, solves: solve_warnings });
        }
        if ex.is_saturated() {
            diagnostics.warnings.push(Warning::RankSaturated { disk: i, rank: ex.rank });
        }
        if ex.rank == 0 {
            diagnostics.warnings.push(Warning::EmptyExtraction { disk: i });
        }
        let mut local: Vec<Candidate> = ex
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, &value)| Candidate {
                disk: i,
                value,
                vector: ex.eigenvectors.col(j).to_vec(),
                inside: disk.inscribed_square_contains(value),
            })
            .filter(|c| c.inside || disk.expanded_square_contains(c.value, config.merge_tol))
            .collect();
        local.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
        candidates.extend(local);
    }
    diagnostics.candidates = candidates.iter().filter(|c| c.inside).count();

    // Step 3
    let verified = executor.map(&candidates, |_, c| Ok(verify_eigenvalue(problem, c.value, config)));
    let mut kept: Vec<EigenResult> = Vec::new();
    let mut edge: Vec<EigenResult> = Vec::new();
    for (cand, ver) in candidates.into_iter().zip(verified) {
        let ver = ver?;
        if let Some(error) = ver.error {
            diagnostics.warnings.push(Warning::VerificationFailed { value: cand.value, error });
            continue;
        }
        if !ver.accepted {
            continue;
        }
        let result = EigenResult {
            value: cand.value,
            vector: Some(cand.vector),
            residual: ver.residual,
            method: Method::Beyn,
            disk: Some(cand.disk),
        };
        if cand.inside {
            kept.push(result);
        } else {
            edge.push(result);
        }
    }

    let mut eigenvalues = dedup(kept, config.merge_tol);
    let mut recovered = Vec::new();
    for e in dedup(edge, config.merge_tol) {
        if eigenvalues.iter().all(|k| (k.value - e.value).norm() >= config.merge_tol) {
            diagnostics.warnings.push(Warning::EdgeRecovered { value: e.value });
            recovered.push(e);
        }
    }
    eigenvalues.extend(recovered);
    eigenvalues.sort_by(|a, b| {
        a.disk.cmp(&b.disk).then(a.value.re.total_cmp(&b.value.re)).then(a.value.im.total_cmp(&b.value.im))
    });
    diagnostics.solves = counter.get();
    Ok(RunOutput { eigenvalues, diagnostics })
}

/// Keeps each result unless an earlier kept one lies within `tol`.
fn dedup(results: Vec<EigenResult>, tol: f64) -> Vec<EigenResult> {
    let mut out: Vec<EigenResult> = Vec::with_capacity(results.len());
    for r in results {
        if out.iter().all(|k| (k.value - r.value).norm() >= tol) {
            out.push(r);
        }
    }
    out
}

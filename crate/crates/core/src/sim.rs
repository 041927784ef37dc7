//! The subdivision driver: screen disks level by level with the ratio
//! indicator, split every flagged disk, and report the centers of the
//! surviving disks at the finest level.

use alloc::vec::Vec;

use crate::config::SolverConfig;
use crate::contour::{indicator, SolveCounter};
use crate::error::{Error, Result};
use crate::geometry::Disk;
use crate::linalg::{norm2, smallest_eigenpair};
use crate::parallel::Executor;
use crate::problem::NepProblem;
use crate::rng::ProbeRng;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Indicator subdivision.
    Sim,
    /// Moment extraction with verification.
    Beyn,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sim => "sim",
            Method::Beyn => "beyn",
        }
    }
}

/// One computed eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub value: C64,
    /// Unit eigenvector, when one was recovered.
    pub vector: Option<Vec<C64>>,
    /// `‖T(λ)v‖₂` for [`Method::Sim`], `|λ⁰|` from verification for
    /// [`Method::Beyn`].
    pub residual: f64,
    pub method: Method,
    /// Index into the covering of the disk the value came from.
    pub disk: Option<usize>,
}

/// Conditions that did not stop a run but deserve attention.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Some quadrature solves on this disk were flagged near-singular.
    IllConditioned { center: C64, radius: f64, solves: usize },
    /// A quadrature node hit a singular matrix and the rule was rotated.
    RotatedRule { center: C64, radius: f64 },
    /// The disk could not be processed and was treated as empty.
    DiskFailed { center: C64, radius: f64, error: Error },
    /// Every probe direction carried signal; the disk may hold more
    /// eigenvalues than probe columns.
    RankSaturated { disk: usize, rank: usize },
    /// The indicator flagged the disk but the moments had rank zero.
    EmptyExtraction { disk: usize },
    /// Verification could not be carried out; the candidate was rejected.
    VerificationFailed { value: C64, error: Error },
    /// An eigenvector could not be recovered for this eigenvalue.
    EigenvectorFailed { value: C64, error: Error },
    /// A verified eigenvalue on a shared square edge was admitted after
    /// every neighboring disk filtered it out.
    EdgeRecovered { value: C64 },
}

/// Indicator value of one screened disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskIndicator {
    pub disk: Disk,
    /// `None` when the computation failed.
    pub indicator: Option<f64>,
}

impl DiskIndicator {
    pub fn flagged(&self, tol_ind: f64) -> bool {
        self.indicator.is_some_and(|v| v > tol_ind)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunDiagnostics {
    /// Linear solves issued during the run.
    pub solves: u64,
    /// Indicator rounds (subdivision driver) or 1 (moment driver).
    pub levels: usize,
    /// Indicators of the initial covering, in covering order.
    pub screening: Vec<DiskIndicator>,
    /// Number of disks kept at each level.
    pub survivors_per_level: Vec<usize>,
    /// Eigenvalue estimates before merging or verification.
    pub candidates: usize,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub eigenvalues: Vec<EigenResult>,
    pub diagnostics: RunDiagnostics,
}

impl RunOutput {
    pub fn values(&self) -> Vec<C64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }
}

pub(crate) fn check_inputs<P: NepProblem + ?Sized>(
    problem: &P,
    covering: &[Disk],
    config: &SolverConfig,
) -> Result<()> {
    config.validate()?;
    if problem.dim() == 0 {
        return Err(Error::InvalidConfig("problem dimension must be positive".into()));
    }
    if covering.is_empty() {
        return Err(Error::InvalidGeometry("covering is empty".into()));
    }
    Ok(())
}

/// Computes the indicator of every disk with a shared probe vector.
///
/// Failures are converted into [`Warning::DiskFailed`] and an indicator of
/// `None`; numerical side conditions are reported as warnings too.
pub fn screen_disks<P, E>(
    problem: &P,
    disks: &[Disk],
    f: &[C64],
    n_quad: usize,
    executor: &E,
    counter: &SolveCounter,
    warnings: &mut Vec<Warning>,
) -> Vec<DiskIndicator>
where
    P: NepProblem + ?Sized,
    E: Executor + ?Sized,
{
    let results = executor.map(disks, |_, d| indicator(problem, *d, f, n_quad, counter));
    disks
        .iter()
        .zip(results)
        .map(|(d, res)| {
            let (center, radius) = (d.center(), d.radius());
            let value = match res {
                Ok((value, sample)) => {
                    if sample.rotated {
                        warnings.push(Warning::RotatedRule { center, radius });
                    }
                    if sample.solve_warnings > 0 {
                        warnings.push(Warning::IllConditioned { center, radius, solves: sample.solve_warnings });
                    }
                    Some(value)
                }
                Err(error) => {
                    warnings.push(Warning::DiskFailed { center, radius, error });
                    None
                }
            };
            DiskIndicator { disk: *d, indicator: value }
        })
        .collect()
}

/// Screens a covering once with the probe vector drawn from
/// `config.rng_seed`. Returns the indicators and run diagnostics.
pub fn scan<P, E>(problem: &P, covering: &[Disk], config: &SolverConfig, executor: &E) -> Result<RunDiagnostics>
where
    P: NepProblem + ?Sized,
    E: Executor + ?Sized,
{
    check_inputs(problem, covering, config)?;
    let f = ProbeRng::new(config.rng_seed).unit_vector(problem.dim());
    let counter = SolveCounter::new();
    let mut diagnostics = RunDiagnostics { levels: 1, ..Default::default() };
    diagnostics.screening =
        screen_disks(problem, covering, &f, config.n_quad_sim, executor, &counter, &mut diagnostics.warnings);
    diagnostics.survivors_per_level.push(diagnostics.screening.iter().filter(|s| s.flagged(config.tol_ind)).count());
    diagnostics.solves = counter.get();
    Ok(diagnostics)
}

/// Greedy clustering: in input order, each unconsumed point absorbs every
/// unconsumed point closer than `tol` (strictly) and is replaced by the
/// mean of what it absorbed.
pub fn merge_candidates(points: &[C64], tol: f64) -> Vec<C64> {
    let mut consumed = alloc::vec![false; points.len()];
    let mut out = Vec::new();
    for i in 0..points.len() {
        if consumed[i] {
            continue;
        }
        let seed = points[i];
        let mut sum = C64::new(0.0, 0.0);
        let mut count = 0usize;
        for j in i..points.len() {
            if !consumed[j] && (points[j] - seed).norm() < tol {
                consumed[j] = true;
                sum += points[j];
                count += 1;
            }
        }
        out.push(sum / count as f64);
    }
    out
}

/// Unit eigenvector of `T(λ)` for its smallest-magnitude eigenvalue and
/// the residual `‖T(λ)v‖₂`.
pub fn recover_eigenvector<P: NepProblem + ?Sized>(
    problem: &P,
    lambda: C64,
    config: &SolverConfig,
) -> Result<(Vec<C64>, f64)> {
    let t = problem.evaluate(lambda);
    let pair = smallest_eigenpair(&t, config.shift)?;
    let residual = norm2(&t.matvec(&pair.vector));
    Ok((pair.vector, residual))
}

/// Runs the subdivision driver on `covering`.
///
/// Every level computes the indicators of all active disks through
/// `executor` and keeps those above `tol_ind`; all but the last level
/// split the survivors into quadrants. The centers of the final
/// survivors are sorted, merged within `merge_tol`, and paired with
/// eigenvectors.
pub fn run_pmcima<P, E>(problem: &P, covering: &[Disk], config: &SolverConfig, executor: &E) -> Result<RunOutput>
where
    P: NepProblem + ?Sized,
    E: Executor + ?Sized,
{
    check_inputs(problem, covering, config)?;
    let f = ProbeRng::new(config.rng_seed).unit_vector(problem.dim());
    let counter = SolveCounter::new();
    let mut diagnostics = RunDiagnostics::default();

    let max_radius = covering.iter().map(Disk::radius).fold(0.0, f64::max);
    let levels = config.level_count(max_radius);
    diagnostics.levels = levels;

    let mut active: Vec<Disk> = covering.to_vec();
    let mut survivors: Vec<Disk> = Vec::new();
    for level in 1..=levels {
        let screened =
            screen_disks(problem, &active, &f, config.n_quad_sim, executor, &counter, &mut diagnostics.warnings);
        survivors = screened.iter().filter(|s| s.flagged(config.tol_ind)).map(|s| s.disk).collect();
        if level == 1 {
            diagnostics.screening = screened;
        }
        diagnostics.survivors_per_level.push(survivors.len());
        if survivors.is_empty() {
            break;
        }
        if level < levels {
            active = survivors.iter().flat_map(Disk::subdivide).collect();
        }
    }

    let mut centers: Vec<C64> = survivors.iter().map(Disk::center).collect();
    centers.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    diagnostics.candidates = centers.len();
    let merged = merge_candidates(&centers, config.merge_tol);

    let recovered = executor.map(&merged, |_, &z| recover_eigenvector(problem, z, config));
    let mut eigenvalues = Vec::with_capacity(merged.len());
    for (value, rec) in merged.into_iter().zip(recovered) {
        let (vector, residual) = match rec {
            Ok((v, res)) => (Some(v), res),
            Err(error) => {
                diagnostics.warnings.push(Warning::EigenvectorFailed { value, error });
                (None, f64::NAN)
            }
        };
        eigenvalues.push(EigenResult { value, vector, residual, method: Method::Sim, disk: None });
    }
    diagnostics.solves = counter.get();
    Ok(RunOutput { eigenvalues, diagnostics })
}

//! Command-line front end.
//!
//! ```text
//! nepcim scan   [problem] [region] [solver flags] [--out FILE]
//! nepcim solve  [problem] [region] [solver flags] [--method a|b] [--output json|csv] [--out FILE]
//! nepcim verify [problem] [solver flags] --lambda RE,IM [--lambda RE,IM ...]
//! ```
//!
//! Exit codes: 0 on success (including an empty eigenvalue list), 2 on
//! usage, parse, or configuration errors, 3 when numerical failures
//! prevented any result.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nepcim_core::geometry::{cover_rectangle_with_offset, grid_touches_axes, AXIS_AVOIDING_SHIFT};
use nepcim_core::problems::{appendix_qep, random_qep, PolynomialNep};
use nepcim_core::sim::scan;
use nepcim_core::{run_pmcima, run_pmcimb, verify_eigenvalue, Disk, Error, Rectangle, SolverConfig, C64};

use crate::executor::{ThreadPool, WORKERS_ENV};
use crate::problem_file::load_problem;
use crate::report::{eigenvalues_csv, indicators_csv, verify_csv, RegionEcho, RunReport, VerifyEntry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "nepcim", version, about = "Contour-integral eigensolver for nonlinear eigenvalue problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the indicator of every disk of the covering (CSV).
    Scan {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute all eigenvalues in the region.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        region: RegionArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// a: indicator subdivision; b: moment extraction with verification.
        #[arg(long, value_enum, default_value_t = MethodArg::B)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check candidate eigenvalues by the smallest eigenvalue of T(λ).
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Candidate as `re,im`; repeat for several.
        #[arg(long = "lambda", value_name = "RE,IM", allow_hyphen_values = true, required = true)]
        lambdas: Vec<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        output: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    /// The 4×4 quadratic test problem.
    Appendix,
    /// Quadratic with uniform random coefficients.
    Random,
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Problem file (JSON); overrides --builtin.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Builtin::Appendix)]
    pub builtin: Builtin,
    /// Dimension of the random built-in problem.
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    /// Seed of the random built-in problem.
    #[arg(long, default_value_t = 0)]
    pub problem_seed: u64,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub ymin: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub ymax: f64,
    /// Cells along the real axis; the imaginary axis gets as many square
    /// cells as fit.
    #[arg(long, default_value_t = 9)]
    pub grid: usize,
    #[arg(long, requires = "grid_y")]
    pub grid_x: Option<usize>,
    #[arg(long, requires = "grid_x")]
    pub grid_y: Option<usize>,
    /// Shift the grid slightly when a grid line lies on an axis.
    #[arg(long)]
    pub avoid_axes: bool,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Worker threads [default: $NEPCIM_WORKERS, else available cores].
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    /// Seed for the random probe vectors.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub n_quad_sim: usize,
    #[arg(long, default_value_t = 64)]
    pub n_quad_beyn: usize,
    #[arg(long, default_value_t = 0.1)]
    pub tol_ind: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol_eps: f64,
    #[arg(long)]
    pub tol_svd: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub probe_count: usize,
    /// [default: tol_eps]
    #[arg(long)]
    pub merge_tol: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub verify_tol: f64,
    /// Shift for the smallest-eigenvalue iteration, as `re,im`.
    #[arg(long, default_value = "0.001,0", allow_hyphen_values = true)]
    pub shift: String,
    #[arg(long, default_value_t = 2)]
    pub extra_levels: usize,
    /// Also solve the quadrature nodes of each moment computation in parallel.
    #[arg(long)]
    pub inner_parallel: bool,
    /// Accept n_quad_beyn below 32 with the default tol_svd.
    #[arg(long)]
    pub allow_small_beyn_quadrature: bool,
}

/// An error that ends the command, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SingularSystem { .. } | Error::NumericalFailure(_) | Error::TaskPanicked { .. } => {
                CliError::numerical(e.to_string())
            }
            _ => CliError::usage(e.to_string()),
        }
    }
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part in {s:?}"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part in {s:?}"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("non-finite value {s:?}"));
    }
    Ok(C64::new(re, im))
}

impl ProblemArgs {
    fn load(&self) -> Result<(PolynomialNep, String), CliError> {
        if let Some(path) = &self.problem {
            let p = load_problem(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            return Ok((p, path.display().to_string()));
        }
        match self.builtin {
            Builtin::Appendix => Ok((appendix_qep(), "appendix".into())),
            Builtin::Random => {
                if self.dim == 0 {
                    return Err(CliError::usage("--dim must be positive"));
                }
                Ok((
                    random_qep(self.dim, self.problem_seed),
                    format!("random(dim={}, seed={})", self.dim, self.problem_seed),
                ))
            }
        }
    }
}

impl RegionArgs {
    fn covering(&self) -> Result<(Vec<Disk>, RegionEcho), CliError> {
        let domain = Rectangle::new(self.xmin, self.xmax, self.ymin, self.ymax)?;
        let (gx, gy) = match (self.grid_x, self.grid_y) {
            (Some(x), Some(y)) => (x, y),
            _ => (self.grid, domain.square_cells_y(self.grid)?),
        };
        if gx == 0 || gy == 0 {
            return Err(CliError::usage("grid counts must be at least 1"));
        }
        let offset = if self.avoid_axes && grid_touches_axes(&domain, gx, gy, 1e-12) {
            C64::new(AXIS_AVOIDING_SHIFT, AXIS_AVOIDING_SHIFT)
        } else {
            C64::new(0.0, 0.0)
        };
        let disks = cover_rectangle_with_offset(&domain, gx, gy, offset)?;
        Ok((disks, RegionEcho::new(&domain, gx, gy, [offset.re, offset.im])))
    }
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig, CliError> {
        let defaults = SolverConfig::default();
        if self.tol_svd.is_none() && self.n_quad_beyn < 32 && !self.allow_small_beyn_quadrature {
            return Err(CliError::usage(format!(
                "n_quad_beyn = {} is below 32 with the default tol_svd; set --tol-svd or pass --allow-small-beyn-quadrature",
                self.n_quad_beyn
            )));
        }
        let workers = match self.workers {
            Some(0) => return Err(CliError::usage("--workers must be positive")),
            Some(w) => w,
            None => crate::executor::default_workers(),
        };
        let cfg = SolverConfig {
            n_quad_sim: self.n_quad_sim,
            n_quad_beyn: self.n_quad_beyn,
            tol_ind: self.tol_ind,
            tol_eps: self.tol_eps,
            tol_svd: self.tol_svd.unwrap_or(defaults.tol_svd),
            probe_count: self.probe_count,
            merge_tol: self.merge_tol.unwrap_or(self.tol_eps),
            verify_tol: self.verify_tol,
            shift: parse_complex(&self.shift).map_err(CliError::usage)?,
            extra_levels: self.extra_levels,
            workers,
            inner_parallel: self.inner_parallel,
            rng_seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::usage(format!("cannot write output: {e}")))
        }
    }
}

/// Runs a parsed command and returns its exit code.
pub fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Scan { problem, region, solver, out } => {
            let (p, _) = problem.load()?;
            let (covering, _) = region.covering()?;
            let cfg = solver.config()?;
            let diagnostics = scan(&p, &covering, &cfg, &ThreadPool::new(cfg.workers))?;
            emit(&out, &indicators_csv(&crate::report::indicator_entries(&diagnostics.screening, cfg.tol_ind)))?;
            report_warnings(&diagnostics.warnings);
            if diagnostics.screening.iter().all(|s| s.indicator.is_none()) {
                return Err(CliError::numerical("every indicator computation failed"));
            }
            Ok(EXIT_OK)
        }
        Command::Solve { problem, region, solver, method, output, out } => {
            let (p, name) = problem.load()?;
            let (covering, echo) = region.covering()?;
            let cfg = solver.config()?;
            let pool = ThreadPool::new(cfg.workers);
            let start = Instant::now();
            let run = match method {
                MethodArg::A => run_pmcima(&p, &covering, &cfg, &pool)?,
                MethodArg::B => run_pmcimb(&p, &covering, &cfg, &pool)?,
            };
            let elapsed = start.elapsed().as_secs_f64();
            let label = match method {
                MethodArg::A => "sim",
                MethodArg::B => "beyn",
            };
            let report = RunReport::new(label, &name, echo, &cfg, &run.eigenvalues, &run.diagnostics, elapsed);
            let text = match output {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => eigenvalues_csv(&report.eigenvalues),
            };
            emit(&out, &text)?;
            report_warnings(&run.diagnostics.warnings);
            let all_failed = run.diagnostics.screening.iter().all(|s| s.indicator.is_none());
            if run.eigenvalues.is_empty() && all_failed {
                return Err(CliError::numerical("numerical failures on every disk; no result"));
            }
            Ok(EXIT_OK)
        }
        Command::Verify { problem, solver, lambdas, output, out } => {
            let (p, _) = problem.load()?;
            let cfg = solver.config()?;
            let values =
                lambdas.iter().map(|s| parse_complex(s)).collect::<Result<Vec<_>, _>>().map_err(CliError::usage)?;
            let pool = ThreadPool::new(cfg.workers);
            let results = nepcim_core::Executor::map(&pool, &values, |_, &z| Ok(verify_eigenvalue(&p, z, &cfg)));
            let entries: Vec<VerifyEntry> = values
                .iter()
                .zip(results)
                .map(|(z, r)| {
                    let v = r.unwrap_or_else(|e| nepcim_core::Verification {
                        accepted: false,
                        residual: f64::NAN,
                        error: Some(e),
                    });
                    VerifyEntry {
                        re: z.re,
                        im: z.im,
                        residual: v.residual.is_finite().then_some(v.residual),
                        accepted: v.accepted,
                        error: v.error.map(|e| e.to_string()),
                    }
                })
                .collect();
            let text = match output {
                OutputFormat::Json => serde_json::to_string_pretty(&entries).expect("entries serialize") + "\n",
                OutputFormat::Csv => verify_csv(&entries),
            };
            emit(&out, &text)?;
            Ok(EXIT_OK)
        }
    }
}

fn report_warnings(warnings: &[nepcim_core::Warning]) {
    for w in warnings {
        eprintln!("warning: {}", crate::report::describe_warning(w));
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code. Errors go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("-1.5,2").unwrap(), C64::new(-1.5, 2.0));
        assert_eq!(parse_complex(" 0 , -0.25 ").unwrap(), C64::new(0.0, -0.25));
        assert!(parse_complex("1").is_err());
        assert!(parse_complex("1,x").is_err());
        assert!(parse_complex("inf,0").is_err());
    }

    #[test]
    fn small_beyn_quadrature_needs_override() {
        let cli = Cli::try_parse_from(["nepcim", "solve", "--n-quad-beyn", "16", "--workers", "1"]).unwrap();
        let Command::Solve { solver, .. } = cli.command else { panic!() };
        assert_eq!(solver.config().unwrap_err().code, EXIT_USAGE);
        let cli = Cli::try_parse_from([
            "nepcim",
            "solve",
            "--n-quad-beyn",
            "16",
            "--allow-small-beyn-quadrature",
            "--workers",
            "1",
        ])
        .unwrap();
        let Command::Solve { solver, .. } = cli.command else { panic!() };
        assert_eq!(solver.config().unwrap().n_quad_beyn, 16);
    }

    #[test]
    fn grid_for_wide_region() {
        let cli = Cli::try_parse_from([
            "nepcim", "scan", "--xmin", "0", "--xmax", "2", "--ymin", "0", "--ymax", "1", "--grid", "4",
        ])
        .unwrap();
        let Command::Scan { region, .. } = cli.command else { panic!() };
        let (disks, echo) = region.covering().unwrap();
        assert_eq!((echo.grid_x, echo.grid_y), (4, 2));
        assert_eq!(disks.len(), 8);
    }

    #[test]
    fn axis_avoidance() {
        let cli = Cli::try_parse_from(["nepcim", "scan", "--grid", "2", "--avoid-axes"]).unwrap();
        let Command::Scan { region, .. } = cli.command else { panic!() };
        let (_, echo) = region.covering().unwrap();
        assert_eq!(echo.offset, [AXIS_AVOIDING_SHIFT, AXIS_AVOIDING_SHIFT]);
    }
}

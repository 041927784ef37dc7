//! Standard-library companion to `nepcim-core`: a threaded executor, JSON
//! problem files, run reports, and the `nepcim` command-line tool.

pub mod cli;
pub mod executor;
pub mod problem_file;
pub mod report;

pub use executor::ThreadPool;
pub use nepcim_core;
pub use problem_file::{load_problem, parse_problem, save_problem, ProblemFileError};
pub use report::RunReport;

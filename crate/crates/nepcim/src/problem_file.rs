//! JSON problem files for matrix polynomials.
//!
//! ```json
//! {
//!   "kind": "polynomial",
//!   "dim": 2,
//!   "degree": 1,
//!   "coefficients": [
//!     [[[-1, 0], [0, 0]], [[0, 0], [-2, 0]]],
//!     [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
//!   ]
//! }
//! ```
//!
//! `coefficients[k]` is the matrix multiplying `z^k`, written row by row;
//! every entry is a `[re, im]` pair. Unknown keys are rejected, as are
//! numbers that do not fit in an `f64`.

use std::fmt;
use std::fs;
use std::path::Path;

use nepcim_core::problems::PolynomialNep;
use nepcim_core::{DenseMatrix, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: String,
    pub dim: usize,
    pub degree: usize,
    pub coefficients: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug)]
pub enum ProblemFileError {
    Io(std::io::Error),
    /// Syntax or schema error at a 1-based line and column.
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed JSON that does not describe a valid problem.
    Invalid(String),
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for ProblemFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemFileError::Io(e) => write!(f, "cannot read problem file: {e}"),
            ProblemFileError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            ProblemFileError::Invalid(msg) => write!(f, "invalid problem: {msg}"),
            ProblemFileError::DimensionMismatch { what, expected, found } => {
                write!(f, "dimension mismatch in {what}: expected {expected}, found {found}")
            }
        }
    }
}

impl std::error::Error for ProblemFileError {}

impl From<serde_json::Error> for ProblemFileError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the message.
        let message = match message.rfind(" at line ") {
            Some(pos) => message[..pos].to_string(),
            None => message,
        };
        ProblemFileError::Parse { line: e.line(), column: e.column(), message }
    }
}

impl ProblemFile {
    pub fn from_polynomial(p: &PolynomialNep) -> Self {
        let n = p.coefficients()[0].rows();
        let coefficients = p
            .coefficients()
            .iter()
            .map(|m| (0..n).map(|i| (0..n).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
            .collect();
        ProblemFile { kind: "polynomial".into(), dim: n, degree: p.degree(), coefficients }
    }

    pub fn to_polynomial(&self) -> Result<PolynomialNep, ProblemFileError> {
        if self.kind != "polynomial" {
            return Err(ProblemFileError::Invalid(format!(
                "unsupported kind {:?}; only \"polynomial\" is supported",
                self.kind
            )));
        }
        let n = self.dim;
        if n == 0 {
            return Err(ProblemFileError::Invalid("dim must be positive".into()));
        }
        if self.coefficients.len() != self.degree + 1 {
            return Err(ProblemFileError::DimensionMismatch {
                what: "coefficients (degree + 1 matrices)".into(),
                expected: self.degree + 1,
                found: self.coefficients.len(),
            });
        }
        let mut mats = Vec::with_capacity(self.coefficients.len());
        for (k, rows) in self.coefficients.iter().enumerate() {
            if rows.len() != n {
                return Err(ProblemFileError::DimensionMismatch {
                    what: format!("rows of coefficients[{k}]"),
                    expected: n,
                    found: rows.len(),
                });
            }
            let mut m = DenseMatrix::zeros(n, n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(ProblemFileError::DimensionMismatch {
                        what: format!("row {i} of coefficients[{k}]"),
                        expected: n,
                        found: row.len(),
                    });
                }
                for (j, &[re, im]) in row.iter().enumerate() {
                    if !(re.is_finite() && im.is_finite()) {
                        return Err(ProblemFileError::Invalid(format!(
                            "non-finite entry ({i}, {j}) in coefficients[{k}]"
                        )));
                    }
                    m[(i, j)] = C64::new(re, im);
                }
            }
            mats.push(m);
        }
        PolynomialNep::new(mats).map_err(|e| ProblemFileError::Invalid(e.to_string()))
    }
}

pub fn parse_problem(text: &str) -> Result<PolynomialNep, ProblemFileError> {
    serde_json::from_str::<ProblemFile>(text)?.to_polynomial()
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<PolynomialNep, ProblemFileError> {
    parse_problem(&fs::read_to_string(path).map_err(ProblemFileError::Io)?)
}

pub fn problem_to_string(p: &PolynomialNep) -> String {
    serde_json::to_string_pretty(&ProblemFile::from_polynomial(p)).expect("problem files serialize")
}

pub fn save_problem(p: &PolynomialNep, path: impl AsRef<Path>) -> std::io::Result<()> {
    fs::write(path, problem_to_string(p) + "\n")
}

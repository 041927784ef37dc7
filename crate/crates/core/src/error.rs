use alloc::string::String;
use core::fmt;

/// Errors raised by the solvers and their kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A pivot of an LU factorization was exactly zero.
    SingularSystem {
        pivot: usize,
    },
    /// An iterative kernel did not converge or produced non-finite values.
    NumericalFailure(String),
    /// Every singular value of the zeroth moment exceeded the threshold,
    /// so the probe block may be too narrow for the disk.
    RankSaturated {
        rank: usize,
    },
    /// Operand shapes do not agree.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    InvalidGeometry(String),
    InvalidConfig(String),
    /// The linearization oracle needs an invertible leading coefficient.
    OracleUnavailable,
    /// A parallel task panicked.
    TaskPanicked {
        index: usize,
    },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::NumericalFailure(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SingularSystem { pivot } => write!(f, "singular system: zero pivot at index {pivot}"),
            Error::NumericalFailure(msg) => write!(f, "numerical failure: {msg}"),
            Error::RankSaturated { rank } => write!(
                f,
                "rank saturated: all {rank} singular values exceed the threshold; increase the probe count or shrink the disk"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidGeometry(msg) => write!(f, "invalid geometry: {msg}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::OracleUnavailable => write!(f, "oracle unavailable: leading coefficient is singular"),
            Error::TaskPanicked { index } => write!(f, "task {index} panicked"),
        }
    }
}

impl core::error::Error for Error {}

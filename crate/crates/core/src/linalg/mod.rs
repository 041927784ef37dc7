//! Dense complex linear algebra used by the solvers.
//!
//! All kernels are deterministic: the same input produces bitwise the same
//! output, whichever thread runs it.

mod eig;
mod lu;
mod matrix;
mod shift_invert;
mod svd;

pub use eig::{dense_eig, eigenvalues, EigenDecomposition};
pub use lu::{lu_solve, LuFactor, LuSolution};
pub use matrix::{dot_conj, norm2, normalize, DenseMatrix};
pub use shift_invert::{smallest_eigenpair, Eigenpair};
pub use svd::{thin_svd, SvdResult};

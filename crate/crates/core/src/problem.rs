use crate::linalg::DenseMatrix;
use crate::C64;

/// A holomorphic matrix-valued function `T(z)` of fixed dimension.
///
/// Implementations must be pure: evaluating the same `z` twice yields
/// identical matrices. The solvers call `evaluate_into` from several
/// threads at once.
pub trait NepProblem: Sync {
    fn dim(&self) -> usize;

    /// Writes `T(z)` into `out`, which is `dim × dim`.
    fn evaluate_into(&self, z: C64, out: &mut DenseMatrix);

    fn evaluate(&self, z: C64) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n, n);
        self.evaluate_into(z, &mut m);
        m
    }
}

impl<P: NepProblem + ?Sized> NepProblem for &P {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate_into(&self, z: C64, out: &mut DenseMatrix) {
        (**self).evaluate_into(z, out)
    }
}

/// Adapts a closure into a [`NepProblem`].
pub struct FnProblem<F> {
    dim: usize,
    f: F,
}

impl<F> FnProblem<F>
where
    F: Fn(C64, &mut DenseMatrix) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnProblem { dim, f }
    }
}

impl<F> core::fmt::Debug for FnProblem<F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnProblem").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl<F> NepProblem for FnProblem<F>
where
    F: Fn(C64, &mut DenseMatrix) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate_into(&self, z: C64, out: &mut DenseMatrix) {
        (self.f)(z, out)
    }
}

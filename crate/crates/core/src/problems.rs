//! Built-in problems and the linearization oracle used by the tests.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, DenseMatrix, LuFactor};
use crate::problem::NepProblem;
use crate::rng::ProbeRng;
use crate::C64;

/// `T(z) = Σ_k z^k T_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialNep {
    coefficients: Vec<DenseMatrix>,
}

impl PolynomialNep {
    /// Coefficients in increasing powers of `z`. All must be square and of
    /// equal size, and the leading one must not be identically zero.
    pub fn new(coefficients: Vec<DenseMatrix>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidConfig("polynomial needs at least one coefficient".into()))?;
        let n = first.rows();
        if n == 0 {
            return Err(Error::InvalidConfig("polynomial dimension must be positive".into()));
        }
        for m in &coefficients {
            if m.rows() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.rows() });
            }
            if m.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: m.cols() });
            }
            if !m.is_finite() {
                return Err(Error::InvalidConfig("coefficients must be finite".into()));
            }
        }
        if coefficients.len() > 1 && coefficients.last().is_some_and(|m| m.frobenius_norm() == 0.0) {
            return Err(Error::InvalidConfig("leading coefficient is identically zero".into()));
        }
        Ok(PolynomialNep { coefficients })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[DenseMatrix] {
        &self.coefficients
    }
}

impl NepProblem for PolynomialNep {
    fn dim(&self) -> usize {
        self.coefficients[0].rows()
    }

    fn evaluate_into(&self, z: C64, out: &mut DenseMatrix) {
        let (last, rest) = self.coefficients.split_last().expect("nonempty");
        out.as_mut_slice().copy_from_slice(last.as_slice());
        for m in rest.iter().rev() {
            for (o, &t) in out.as_mut_slice().iter_mut().zip(m.as_slice()) {
                *o = *o * z + t;
            }
        }
    }
}

/// `T(z) = diag(z − μ_1, …, z − μ_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalNep {
    roots: Vec<C64>,
}

impl DiagonalNep {
    pub fn new(roots: Vec<C64>) -> Self {
        DiagonalNep { roots }
    }

    /// Planted roots followed by padding roots.
    pub fn with_padding(planted: &[C64], padding: &[C64]) -> Self {
        DiagonalNep { roots: planted.iter().chain(padding).copied().collect() }
    }

    pub fn roots(&self) -> &[C64] {
        &self.roots
    }
}

impl NepProblem for DiagonalNep {
    fn dim(&self) -> usize {
        self.roots.len()
    }

    fn evaluate_into(&self, z: C64, out: &mut DenseMatrix) {
        out.fill(C64::new(0.0, 0.0));
        for (i, &mu) in self.roots.iter().enumerate() {
            out[(i, i)] = z - mu;
        }
    }
}

/// The 4×4 quadratic `T0 + z T1 + z² T2` with real symmetric coefficients.
pub fn appendix_qep() -> PolynomialNep {
    let t0 = DenseMatrix::from_real_rows(&[
        [-7.0, 2.0, 4.0, 0.0],
        [2.0, -4.0, 2.0, 0.0],
        [4.0, 2.0, -9.0, 3.0],
        [0.0, 0.0, 3.0, -3.0],
    ]);
    let t1 = DenseMatrix::from_real_rows(&[
        [0.4, 0.0, -0.3, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [-0.3, 0.0, 0.5, -0.2],
        [0.0, 0.0, -0.2, 0.2],
    ]);
    let t2 = DenseMatrix::from_real_rows(&[
        [3.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 3.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]);
    PolynomialNep { coefficients: alloc::vec![t0, t1, t2] }
}

/// Quadratic with entries of `T0`, `T1`, `T2` (drawn in that order, each
/// row by row) uniform in `[0, 1)`.
pub fn random_qep(n: usize, seed: u64) -> PolynomialNep {
    assert!(n >= 1, "dimension must be positive");
    let mut rng = ProbeRng::new(seed);
    let coefficients = (0..3).map(|_| rng.uniform_matrix(n, n)).collect();
    PolynomialNep { coefficients }
}

/// All finite eigenvalues of `p`, from the block companion matrix of
/// `T_d⁻¹ T(z)`. Meant for testing only.
pub fn companion_oracle(p: &PolynomialNep) -> Result<Vec<C64>> {
    let n = p.dim();
    let d = p.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    let lead = match LuFactor::factor(p.coefficients[d].clone()) {
        Ok(lu) if !lu.near_singular() => lu,
        Ok(_) | Err(Error::SingularSystem { .. }) => return Err(Error::OracleUnavailable),
        Err(e) => return Err(e),
    };
    let size = n * d;
    let mut comp = DenseMatrix::zeros(size, size);
    for k in 0..d - 1 {
        for i in 0..n {
            comp[(k * n + i, (k + 1) * n + i)] = C64::new(1.0, 0.0);
        }
    }
    for k in 0..d {
        let mut a = p.coefficients[k].clone();
        lead.solve_in_place(&mut a);
        for j in 0..n {
            for i in 0..n {
                comp[((d - 1) * n + i, k * n + j)] = -a[(i, j)];
            }
        }
    }
    eigenvalues(&comp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn appendix_values() {
        let p = appendix_qep();
        assert_eq!(p.evaluate(c(0.0, 0.0)), p.coefficients()[0]);
        let t1 = p.evaluate(c(1.0, 0.0));
        assert!((t1[(0, 0)] - c(-3.6, 0.0)).norm() < 1e-15);
        let z = c(0.7, -1.3);
        let t = p.evaluate(z);
        assert_eq!(t, t.transpose());
    }

    #[test]
    fn random_is_reproducible() {
        let a = random_qep(5, 3);
        assert_eq!(a, random_qep(5, 3));
        assert_ne!(a, random_qep(5, 4));
        for m in a.coefficients() {
            assert!(m.as_slice().iter().all(|x| (0.0..1.0).contains(&x.re) && x.im == 0.0));
        }
    }

    #[test]
    fn oracle_on_scalar_roots() {
        let one = DenseMatrix::identity(2);
        let p = PolynomialNep::new(vec![one.clone(), DenseMatrix::zeros(2, 2), one]).unwrap();
        let ev = sorted(companion_oracle(&p).unwrap());
        let want = [c(0.0, -1.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 1.0)];
        for (g, w) in ev.iter().zip(&want) {
            assert!((g - w).norm() < 1e-7, "{g} vs {w}");
        }
    }

    #[test]
    fn oracle_on_linear_diagonal() {
        let p = PolynomialNep::new(vec![
            DenseMatrix::from_diagonal(&[c(-1.0, 0.0), c(-2.0, 0.0)]),
            DenseMatrix::identity(2),
        ])
        .unwrap();
        let ev = sorted(companion_oracle(&p).unwrap());
        assert!((ev[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((ev[1] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn oracle_needs_regular_leading_term() {
        let mut t2 = DenseMatrix::identity(2);
        t2[(1, 1)] = c(0.0, 0.0);
        let p = PolynomialNep::new(vec![DenseMatrix::identity(2), t2]).unwrap();
        assert_eq!(companion_oracle(&p), Err(Error::OracleUnavailable));
    }

    #[test]
    fn appendix_oracle_roots_are_singular_points() {
        let p = appendix_qep();
        let ev = companion_oracle(&p).unwrap();
        assert_eq!(ev.len(), 8);
        for &z in &ev {
            let t = p.evaluate(z);
            let det = LuFactor::factor(t.clone()).map(|lu| lu.determinant()).unwrap_or_default();
            let scale = t.frobenius_norm();
            assert!(det.norm() < 1e-8 * scale * scale * scale * scale, "{z}: {det}");
        }
    }

    #[test]
    fn validation() {
        assert!(PolynomialNep::new(vec![]).is_err());
        assert!(PolynomialNep::new(vec![DenseMatrix::identity(2), DenseMatrix::identity(3)]).is_err());
        assert!(PolynomialNep::new(vec![DenseMatrix::identity(2), DenseMatrix::zeros(2, 2)]).is_err());
    }
}

//! Smallest-magnitude eigenpair by shift-and-invert iteration.

use alloc::format;
use alloc::vec::Vec;

use super::lu::LuFactor;
use super::matrix::{dot_conj, norm2, normalize, DenseMatrix};
use crate::error::{Error, Result};
use crate::C64;

pub const MAX_ITERATIONS: usize = 500;
const SHIFT_RETRIES: usize = 3;

/// Eigenvalue of `A` nearest `shift`, with a unit eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: C64,
    pub vector: Vec<C64>,
    pub iterations: usize,
}

/// Inverse iteration on `(A − σI)⁻¹`.
///
/// If `A − σI` cannot be factored, `σ` is multiplied by `1 + i` and the
/// factorization retried, at most three times. Iteration stops when two
/// successive eigenvalue estimates differ by less than `1e-12·(1 + |λ|)`.
/// When several eigenvalues are equally close to the shift the one returned
/// is whichever the iteration settles on.
pub fn smallest_eigenpair(a: &DenseMatrix, shift: C64) -> Result<Eigenpair> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    let mut sigma = shift;
    let mut attempt = 0;
    let lu = loop {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= sigma;
        }
        match LuFactor::factor(shifted) {
            Ok(lu) => break lu,
            Err(Error::SingularSystem { .. }) if attempt < SHIFT_RETRIES => {
                attempt += 1;
                sigma *= C64::new(1.0, 1.0);
            }
            Err(Error::SingularSystem { pivot }) => {
                return Err(Error::numerical(format!(
                    "shifted matrix singular at pivot {pivot} after {SHIFT_RETRIES} shift perturbations"
                )))
            }
            Err(e) => return Err(e),
        }
    };

    let mut v: Vec<C64> = (0..n)
        .map(|i| {
            let t = i as f64 + 1.0;
            C64::new(1.0 + 0.5 * libm::sin(t), 0.25 * libm::cos(1.7 * t))
        })
        .collect();
    normalize(&mut v);

    let mut previous: Option<C64> = None;
    for it in 1..=MAX_ITERATIONS {
        let mut w = v.clone();
        lu.solve_vec_in_place(&mut w);
        let theta = dot_conj(&v, &w);
        let wn = norm2(&w);
        if !(wn.is_finite()) || wn == 0.0 {
            return Err(Error::numerical("inverse iteration produced a degenerate vector"));
        }
        w.iter_mut().for_each(|x| *x /= wn);
        v = w;
        if theta.norm() == 0.0 {
            continue;
        }
        let estimate = sigma + theta.inv();
        if let Some(prev) = previous {
            if (estimate - prev).norm() < 1e-12 * (1.0 + estimate.norm()) {
                let av = a.matvec(&v);
                let value = dot_conj(&v, &av);
                return Ok(Eigenpair { value, vector: v, iterations: it });
            }
        }
        previous = Some(estimate);
    }
    Err(Error::numerical(format!("shift-invert iteration did not converge in {MAX_ITERATIONS} iterations")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense_eig;
    use crate::rng::ProbeRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_nearest_to_shift() {
        let a = DenseMatrix::from_diagonal(&[c(1e-9, 0.0), c(5.0, 0.0), c(-2.0, 0.0)]);
        let e = smallest_eigenpair(&a, c(0.001, 0.0)).unwrap();
        assert!((e.value - c(1e-9, 0.0)).norm() < 1e-20);
        assert!((e.vector[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_on_an_eigenvalue_is_perturbed() {
        let a = DenseMatrix::from_diagonal(&[c(0.001, 0.0), c(3.0, 0.0)]);
        let e = smallest_eigenpair(&a, c(0.001, 0.0)).unwrap();
        assert!((e.value - c(0.001, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn agrees_with_dense_eig() {
        let mut rng = ProbeRng::new(21);
        for n in [3, 7, 12, 20] {
            let a = rng.complex_matrix(n, n);
            let shift = c(0.001, 0.0);
            let all = dense_eig(&a).unwrap().values;
            let nearest = all.iter().copied().min_by(|x, y| (x - shift).norm().total_cmp(&(y - shift).norm())).unwrap();
            let e = smallest_eigenpair(&a, shift).unwrap();
            assert!((e.value - nearest).norm() < 1e-9 * (1.0 + nearest.norm()), "n={n}");
            let av = a.matvec(&e.vector);
            let r: Vec<C64> = av.iter().zip(&e.vector).map(|(x, y)| x - e.value * y).collect();
            assert!(norm2(&r) <= 1e-8 * a.frobenius_norm());
        }
    }

    #[test]
    fn non_square_rejected() {
        assert!(smallest_eigenpair(&DenseMatrix::zeros(2, 3), c(0.0, 0.0)).is_err());
    }
}

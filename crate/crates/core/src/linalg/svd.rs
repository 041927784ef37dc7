//! Thin SVD by one-sided (Hestenes) Jacobi rotations.

use alloc::vec::Vec;

use super::matrix::{dot_conj, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::C64;

const MAX_SWEEPS: usize = 80;

/// `A = U · diag(sigma) · Wᴴ` with `U` n×ℓ and `W` ℓ×ℓ.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    pub w: DenseMatrix,
}

impl SvdResult {
    /// Number of singular values strictly above `tol`.
    pub fn rank_above(&self, tol: f64) -> usize {
        self.sigma.iter().take_while(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for (j, &s) in self.sigma.iter().enumerate() {
            us.col_mut(j).iter_mut().for_each(|x| *x *= s);
        }
        us.matmul(&self.w.adjoint())
    }
}

/// Thin SVD of an n×ℓ matrix with ℓ ≤ n.
pub fn thin_svd(a: &DenseMatrix) -> Result<SvdResult> {
    let (n, l) = (a.rows(), a.cols());
    if l > n {
        return Err(Error::DimensionMismatch { expected: n, found: l });
    }
    if !a.is_finite() {
        return Err(Error::numerical("svd input has non-finite entries"));
    }
    let mut work = a.clone();
    let mut w = DenseMatrix::identity(l);
    let eps = f64::EPSILON;

    let mut converged = l < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..l {
            for q in p + 1..l {
                let alpha = sq(norm2(work.col(p)));
                let beta = sq(norm2(work.col(q)));
                let gamma = dot_conj(work.col(p), work.col(q));
                let g = gamma.norm();
                if g == 0.0 || g <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                // Phase e^{-iφ} makes the off-diagonal entry real, then a
                // real rotation annihilates it.
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = cs * t;
                rotate_columns(&mut work, p, q, phase, cs, sn);
                rotate_columns(&mut w, p, q, phase, cs, sn);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::numerical("Jacobi SVD did not converge"));
    }

    let sigma: Vec<f64> = (0..l).map(|j| norm2(work.col(j))).collect();
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));

    let mut u = DenseMatrix::zeros(n, l);
    let mut w_sorted = DenseMatrix::zeros(l, l);
    let sigma_sorted: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    for (dst, &src) in order.iter().enumerate() {
        w_sorted.col_mut(dst).copy_from_slice(w.col(src));
        let s = sigma[src];
        let col = u.col_mut(dst);
        if s > 0.0 {
            for (x, &y) in col.iter_mut().zip(work.col(src)) {
                *x = y / s;
            }
        }
    }
    complete_orthonormal(&mut u);
    Ok(SvdResult { u, sigma: sigma_sorted, w: w_sorted })
}

fn sq(x: f64) -> f64 {
    x * x
}

/// `[a_p, a_q] ← [a_p, a_q·phase] · [[c, s], [-s, c]]`.
fn rotate_columns(m: &mut DenseMatrix, p: usize, q: usize, phase: C64, c: f64, s: f64) {
    let rows = m.rows();
    let data = m.as_mut_slice();
    let (lo, hi) = data.split_at_mut(q * rows);
    let cp = &mut lo[p * rows..(p + 1) * rows];
    let cq = &mut hi[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y * phase;
        *x = a * c - b * s;
        *y = a * s + b * c;
    }
}

/// Re-orthonormalizes columns by two passes of modified Gram-Schmidt,
/// replacing numerically null columns with unit vectors orthogonal to the
/// preceding ones. Only columns belonging to tiny singular values move by
/// more than round-off.
fn complete_orthonormal(u: &mut DenseMatrix) {
    let (n, l) = (u.rows(), u.cols());
    let mut next_unit = 0;
    for j in 0..l {
        let mut original = norm2(u.col(j));
        loop {
            for _ in 0..2 {
                for k in 0..j {
                    let (prev, cur) = split_cols(u, k, j);
                    let proj = dot_conj(prev, cur);
                    for (x, &y) in cur.iter_mut().zip(prev.iter()) {
                        *x -= proj * y;
                    }
                }
            }
            let norm = norm2(u.col(j));
            if original > 0.0 && norm > 0.5 * original {
                u.col_mut(j).iter_mut().for_each(|x| *x /= norm);
                break;
            }
            // Column was (numerically) dependent: try the next unit vector.
            assert!(next_unit < n, "cannot complete an orthonormal basis");
            let col = u.col_mut(j);
            col.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            col[next_unit] = C64::new(1.0, 0.0);
            next_unit += 1;
            original = 1.0;
        }
    }
}

fn split_cols(m: &mut DenseMatrix, k: usize, j: usize) -> (&[C64], &mut [C64]) {
    debug_assert!(k < j);
    let rows = m.rows();
    let (lo, hi) = m.as_mut_slice().split_at_mut(j * rows);
    (&lo[k * rows..(k + 1) * rows], &mut hi[..rows])
}

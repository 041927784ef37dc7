//! LU factorization with partial pivoting.

use alloc::vec::Vec;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Packed `PA = LU` factors (unit lower `L`, upper `U`).
#[derive(Debug, Clone)]
pub struct LuFactor {
    lu: DenseMatrix,
    /// Row swapped with row `k` at elimination step `k`.
    pivots: Vec<usize>,
    near_singular: bool,
}

/// Solution of `AX = B` and whether `A` looked numerically singular.
#[derive(Debug, Clone)]
pub struct LuSolution {
    pub x: DenseMatrix,
    pub near_singular: bool,
}

impl LuFactor {
    /// Factors a square matrix in place.
    ///
    /// An exactly zero pivot column is an error. A pivot smaller than
    /// `n·ε·‖A‖∞` only sets the [`near_singular`](Self::near_singular) flag.
    pub fn factor(mut a: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        if !a.is_finite() {
            return Err(Error::numerical("matrix has non-finite entries"));
        }
        let n = a.rows();
        let threshold = n as f64 * f64::EPSILON * a.norm_inf();
        let mut pivots = Vec::with_capacity(n);
        let mut near_singular = false;
        let data = a.as_mut_slice();

        for k in 0..n {
            let col_k = &data[k * n..(k + 1) * n];
            let (mut p, mut best) = (k, -1.0);
            for (i, x) in col_k.iter().enumerate().skip(k) {
                let m = x.re.abs() + x.im.abs();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularSystem { pivot: k });
            }
            pivots.push(p);
            if p != k {
                for j in 0..n {
                    data.swap(j * n + k, j * n + p);
                }
            }
            let pivot = data[k * n + k];
            if pivot.norm() < threshold {
                near_singular = true;
            }
            let inv = pivot.inv();
            for x in &mut data[k * n + k + 1..(k + 1) * n] {
                *x *= inv;
            }
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let l = &head[k * n + k + 1..(k + 1) * n];
            for col in tail.chunks_exact_mut(n) {
                let u = col[k];
                if u.re == 0.0 && u.im == 0.0 {
                    continue;
                }
                for (x, &li) in col[k + 1..].iter_mut().zip(l) {
                    *x -= li * u;
                }
            }
        }
        Ok(LuFactor { lu: a, pivots, near_singular })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn near_singular(&self) -> bool {
        self.near_singular
    }

    pub fn determinant(&self) -> C64 {
        let n = self.dim();
        let swaps = self.pivots.iter().enumerate().filter(|(k, p)| k != *p).count();
        let det: C64 = (0..n).map(|k| self.lu[(k, k)]).product();
        if swaps % 2 == 1 {
            -det
        } else {
            det
        }
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_vec_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side has wrong length");
        for (k, &p) in self.pivots.iter().enumerate() {
            b.swap(k, p);
        }
        let lu = self.lu.as_slice();
        for k in 0..n {
            let xk = b[k];
            if xk.re == 0.0 && xk.im == 0.0 {
                continue;
            }
            let col = &lu[k * n..(k + 1) * n];
            for (bi, &l) in b[k + 1..].iter_mut().zip(&col[k + 1..]) {
                *bi -= l * xk;
            }
        }
        for k in (0..n).rev() {
            let col = &lu[k * n..(k + 1) * n];
            let xk = b[k] / col[k];
            b[k] = xk;
            for (bi, &u) in b[..k].iter_mut().zip(&col[..k]) {
                *bi -= u * xk;
            }
        }
    }

    pub fn solve_in_place(&self, b: &mut DenseMatrix) {
        assert_eq!(b.rows(), self.dim(), "right-hand side has wrong row count");
        for j in 0..b.cols() {
            self.solve_vec_in_place(b.col_mut(j));
        }
    }
}

/// Solves `AX = B` by partial-pivoting LU.
pub fn lu_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<LuSolution> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.rows() });
    }
    let lu = LuFactor::factor(a.clone())?;
    let mut x = b.clone();
    lu.solve_in_place(&mut x);
    Ok(LuSolution { x, near_singular: lu.near_singular() })
}

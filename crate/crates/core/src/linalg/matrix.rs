use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Dense complex matrix stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| rows[i].as_ref()[j])
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == n), "ragged rows");
        Self::from_fn(m, n, |i, j| C64::new(rows[i].as_ref()[j], 0.0))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Wraps a column-major buffer.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length does not match shape");
        DenseMatrix { rows, cols, data }
    }

    pub fn column_vector(v: &[C64]) -> Self {
        Self::from_column_major(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn fill(&mut self, value: C64) {
        self.data.iter_mut().for_each(|x| *x = value);
    }

    /// Copies columns `range` into a new matrix.
    pub fn columns(&self, range: core::ops::Range<usize>) -> DenseMatrix {
        let data = self.data[range.start * self.rows..range.end * self.rows].to_vec();
        DenseMatrix { rows: self.rows, cols: range.len(), data }
    }

    pub fn adjoint(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = rhs[(k, j)];
                if b == ZERO {
                    continue;
                }
                for (d, &a) in dst.iter_mut().zip(self.col(k)) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "vector length differs from column count");
        let mut y = vec![ZERO; self.rows];
        for (k, &xk) in x.iter().enumerate() {
            for (yi, &a) in y.iter_mut().zip(self.col(k)) {
                *yi += a * xk;
            }
        }
        y
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: C64, other: &DenseMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: C64) {
        self.data.iter_mut().for_each(|x| *x *= alpha);
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        let mut out = self.clone();
        out.add_scaled(C64::new(-1.0, 0.0), other);
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut sums = vec![0.0; self.rows];
        for j in 0..self.cols {
            for (s, x) in sums.iter_mut().zip(self.col(j)) {
                *s += x.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

/// Euclidean norm with scaling against overflow.
pub fn norm2(v: &[C64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.re.abs()).max(x.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = v
        .iter()
        .map(|x| {
            let (a, b) = (x.re / scale, x.im / scale);
            a * a + b * b
        })
        .sum();
    scale * libm::sqrt(sum)
}

/// `xᴴ y`.
pub fn dot_conj(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Scales `v` to unit Euclidean norm and returns the original norm.
pub fn normalize(v: &mut [C64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        let inv = 1.0 / n;
        v.iter_mut().for_each(|x| *x *= inv);
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_products() {
        let a = DenseMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(a.col(0), &[C64::new(1.0, 0.0), C64::new(3.0, 0.0)]);
        let b = a.matmul(&DenseMatrix::identity(2));
        assert_eq!(a, b);
        assert_eq!(a.matvec(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]), vec![C64::new(3.0, 0.0), C64::new(7.0, 0.0)]);
        assert_eq!(a.norm_inf(), 7.0);
        assert_eq!(a.trace(), C64::new(5.0, 0.0));
    }

    #[test]
    fn adjoint_conjugates() {
        let a = DenseMatrix::from_rows(&[[C64::new(1.0, 2.0), C64::new(0.0, 1.0)]]);
        let h = a.adjoint();
        assert_eq!((h.rows(), h.cols()), (2, 1));
        assert_eq!(h[(0, 0)], C64::new(1.0, -2.0));
    }

    #[test]
    fn norm_survives_large_entries() {
        let v = [C64::new(1e200, 0.0), C64::new(0.0, 1e200)];
        let n = norm2(&v);
        assert!((n / 1e200 - core::f64::consts::SQRT_2).abs() < 1e-15);
    }
}

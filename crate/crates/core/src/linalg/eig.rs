//! General complex eigendecomposition: balancing, Householder reduction to
//! Hessenberg form, and shifted QR iteration to complex Schur form.

use alloc::vec;
use alloc::vec::Vec;

use super::matrix::{normalize, DenseMatrix};
use crate::error::{Error, Result};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Eigenvalues and unit-norm eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: DenseMatrix,
}

/// Eigenvalues and eigenvectors of a general square complex matrix.
pub fn dense_eig(a: &DenseMatrix) -> Result<EigenDecomposition> {
    let (values, vectors) = decompose(a, true)?;
    Ok(EigenDecomposition { values, vectors: vectors.expect("vectors requested") })
}

/// Eigenvalues only; cheaper than [`dense_eig`] for large matrices.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<C64>> {
    decompose(a, false).map(|(v, _)| v)
}

fn decompose(a: &DenseMatrix, want_vectors: bool) -> Result<(Vec<C64>, Option<DenseMatrix>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::numerical("eigenproblem input has non-finite entries"));
    }
    let n = a.rows();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| DenseMatrix::zeros(0, 0))));
    }
    let mut h = a.clone();
    let scale = balance(&mut h);
    let mut z = want_vectors.then(|| DenseMatrix::identity(n));
    hessenberg(&mut h, z.as_mut());
    schur(&mut h, z.as_mut())?;
    let values: Vec<C64> = (0..n).map(|i| h[(i, i)]).collect();
    let vectors = z.map(|z| {
        let mut v = z.matmul(&triangular_eigenvectors(&h));
        for j in 0..n {
            let col = v.col_mut(j);
            for (x, &s) in col.iter_mut().zip(&scale) {
                *x *= s;
            }
            normalize(col);
        }
        v
    });
    Ok((values, vectors))
}

/// Diagonal similarity `D⁻¹ A D` with power-of-two entries that equalizes
/// row and column norms. Returns `D`.
fn balance(a: &mut DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let mut d = vec![1.0; n];
    let radix = 2.0f64;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].l1_norm();
                    r += a[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                d[i] *= f;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
    d
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// transformations into `z` when given.
fn hessenberg(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>) {
    let n = h.rows();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let alpha_sq: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum();
        let tail_sq: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail_sq == 0.0 {
            continue;
        }
        let alpha = libm::sqrt(alpha_sq);
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + phase·‖x‖·e1, reflector P = I - 2 v vᴴ / (vᴴ v)
        for i in 0..n {
            v[i] = if i <= k { ZERO } else { h[(i, k)] };
        }
        v[k + 1] += phase * alpha;
        let vnorm_sq: f64 = v[k + 1..].iter().map(|x| x.norm_sqr()).sum();
        let tau = 2.0 / vnorm_sq;
        // h ← P h
        for j in 0..n {
            let s: C64 = (k + 1..n).map(|i| v[i].conj() * h[(i, j)]).sum();
            let s = s * tau;
            for i in k + 1..n {
                let vi = v[i];
                h[(i, j)] -= vi * s;
            }
        }
        // h ← h P
        apply_reflector_right(h, &v, k + 1, tau);
        if let Some(z) = z.as_deref_mut() {
            apply_reflector_right(z, &v, k + 1, tau);
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

#[allow(clippy::needless_range_loop)]
fn apply_reflector_right(m: &mut DenseMatrix, v: &[C64], start: usize, tau: f64) {
    let rows = m.rows();
    let mut s = vec![ZERO; rows];
    for j in start..m.cols() {
        let vj = v[j];
        for (si, &x) in s.iter_mut().zip(m.col(j)) {
            *si += x * vj;
        }
    }
    for j in start..m.cols() {
        let vj = v[j].conj() * tau;
        for (x, &si) in m.col_mut(j).iter_mut().zip(&s) {
            *x -= si * vj;
        }
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix. On return `h` is
/// upper triangular and `z` holds the accumulated Schur vectors.
fn schur(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>) -> Result<()> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0;
    let mut rotations: Vec<(f64, C64)> = Vec::with_capacity(n);
    let total_scale = h.as_slice().iter().map(|x| x.l1_norm()).fold(0.0, f64::max);

    while hi > 0 {
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].l1_norm();
            let mut diag = h[(lo, lo)].l1_norm() + h[(lo - 1, lo - 1)].l1_norm();
            if diag == 0.0 {
                diag = total_scale;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(Error::numerical("QR iteration did not converge"));
        }

        let shift = if iter % 10 == 0 {
            // Exceptional shift to break cycles.
            let extra = h[(hi, hi - 1)].re.abs() + if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + C64::new(0.75 * extra, 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // QR step on the active block via Givens rotations.
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotations.push((c, s));
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = y * c - s.conj() * x;
            }
            h[(k + 1, k)] = ZERO;
        }
        for (offset, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + offset;
            let top = (k + 2).min(hi);
            rotate_right(h, k, c, s, top + 1);
            if let Some(z) = z.as_deref_mut() {
                let rows = z.rows();
                rotate_right(z, k, c, s, rows);
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(())
}

/// Columns `k, k+1` of rows `0..rows` times `Gᴴ` where `G = [[c, s], [-s̄, c]]`.
fn rotate_right(m: &mut DenseMatrix, k: usize, c: f64, s: C64, rows: usize) {
    let sc = s.conj();
    for i in 0..rows {
        let x = m[(i, k)];
        let y = m[(i, k + 1)];
        m[(i, k)] = x * c + y * sc;
        m[(i, k + 1)] = y * c - x * s;
    }
}

/// Rotation with real cosine mapping `(a, b)` to `(r, 0)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = libm::hypot(an, bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom.norm() == 0.0 {
        d
    } else {
        d - bc / denom
    }
}

/// Eigenvectors of an upper triangular matrix by back substitution.
fn triangular_eigenvectors(t: &DenseMatrix) -> DenseMatrix {
    let n = t.rows();
    let norm = t.as_slice().iter().map(|x| x.l1_norm()).fold(0.0, f64::max);
    let small = f64::EPSILON * norm.max(f64::MIN_POSITIVE);
    let mut y = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let col = y.col_mut(k);
        col[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * col[j];
            }
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < small {
                denom = C64::new(small, 0.0);
            }
            col[i] = -s / denom;
            // Rescale to keep entries bounded for nearly defective blocks.
            let big = col[i..=k].iter().map(|x| x.l1_norm()).fold(0.0, f64::max);
            if big > 1e100 {
                col[i..=k].iter_mut().for_each(|x| *x /= big);
            }
        }
    }
    y
}

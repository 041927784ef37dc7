//! Seeded random numbers for probes and synthetic problems.
//!
//! The stream is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`). Each
//! real sample takes the top 53 bits of one `u64` output and scales by
//! `2⁻⁵³`, giving a uniform value in `[0, 1)`. Complex samples draw the
//! real part first, then the imaginary part. Matrices are filled row by
//! row. These rules are all another implementation needs to reproduce a
//! seed exactly.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::linalg::{normalize, DenseMatrix};
use crate::C64;

#[derive(Debug, Clone)]
pub struct ProbeRng {
    inner: ChaCha8Rng,
}

impl ProbeRng {
    pub fn new(seed: u64) -> Self {
        ProbeRng { inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Real and imaginary parts uniform in `[-1, 1)`.
    pub fn complex(&mut self) -> C64 {
        let re = 2.0 * self.uniform() - 1.0;
        let im = 2.0 * self.uniform() - 1.0;
        C64::new(re, im)
    }

    pub fn unit_vector(&mut self, n: usize) -> Vec<C64> {
        let mut v: Vec<C64> = (0..n).map(|_| self.complex()).collect();
        normalize(&mut v);
        v
    }

    /// `rows × cols` matrix with independent unit-norm columns.
    pub fn probe_matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..cols {
            data.extend(self.unit_vector(rows));
        }
        DenseMatrix::from_column_major(rows, cols, data)
    }

    /// Entries with real and imaginary parts uniform in `[-1, 1)`.
    pub fn complex_matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex();
            }
        }
        m
    }

    /// Real entries uniform in `[0, 1)`.
    pub fn uniform_matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = C64::new(self.uniform(), 0.0);
            }
        }
        m
    }
}

use alloc::format;

use crate::error::{Error, Result};
use crate::C64;

/// Tolerances, quadrature sizes, and seeding shared by both drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Quadrature points for the ratio indicator (must be even).
    pub n_quad_sim: usize,
    /// Quadrature points for the moment computation.
    pub n_quad_beyn: usize,
    /// A disk is flagged when its indicator exceeds this value.
    pub tol_ind: f64,
    /// Target precision of the subdivision driver.
    pub tol_eps: f64,
    /// Singular values above this are counted in the moment rank.
    pub tol_svd: f64,
    /// Number of random probe columns for the moment computation.
    pub probe_count: usize,
    /// Distance under which two eigenvalue estimates are the same eigenvalue.
    pub merge_tol: f64,
    /// A candidate is accepted when the smallest eigenvalue of `T(λ)` is
    /// below this in magnitude.
    pub verify_tol: f64,
    /// Shift for the smallest-eigenvalue iteration.
    pub shift: C64,
    /// Levels added on top of `ceil(log2(r / tol_eps))`.
    pub extra_levels: usize,
    /// Worker count requested for parallel executors.
    pub workers: usize,
    /// Solve quadrature nodes of one moment computation in parallel.
    pub inner_parallel: bool,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_quad_sim: 16,
            n_quad_beyn: 64,
            tol_ind: 0.1,
            tol_eps: 1e-6,
            tol_svd: 1e-6,
            probe_count: 20,
            merge_tol: 1e-6,
            verify_tol: 1e-6,
            shift: C64::new(0.001, 0.0),
            extra_levels: 2,
            workers: 1,
            inner_parallel: false,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_quad_sim < 4 || self.n_quad_sim % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "n_quad_sim must be even and at least 4, got {}",
                self.n_quad_sim
            )));
        }
        if self.n_quad_beyn < 4 {
            return Err(Error::InvalidConfig(format!("n_quad_beyn must be at least 4, got {}", self.n_quad_beyn)));
        }
        if self.probe_count == 0 {
            return Err(Error::InvalidConfig("probe_count must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be positive".into()));
        }
        let tolerances = [
            ("tol_ind", self.tol_ind),
            ("tol_eps", self.tol_eps),
            ("tol_svd", self.tol_svd),
            ("merge_tol", self.merge_tol),
            ("verify_tol", self.verify_tol),
        ];
        for (name, value) in tolerances {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.shift.re.is_finite() && self.shift.im.is_finite()) {
            return Err(Error::InvalidConfig("shift must be finite".into()));
        }
        Ok(())
    }

    /// Number of indicator levels for disks of radius `radius`.
    pub fn level_count(&self, radius: f64) -> usize {
        let base = libm::ceil(libm::log2(radius / self.tol_eps)).max(1.0) as usize;
        base + self.extra_levels
    }
}

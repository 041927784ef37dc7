//! Machine-readable run reports (JSON) and tables (CSV).
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so reports round-trip exactly and identical runs produce
//! byte-identical files.

use std::fmt::Write as _;

use nepcim_core::sim::{DiskIndicator, Warning};
use nepcim_core::{EigenResult, Rectangle, RunDiagnostics, SolverConfig};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionEcho {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub grid_x: usize,
    pub grid_y: usize,
    /// Shift applied to the covering grid, `[re, im]`.
    pub offset: [f64; 2],
}

impl RegionEcho {
    pub fn new(domain: &Rectangle, grid_x: usize, grid_y: usize, offset: [f64; 2]) -> Self {
        RegionEcho {
            x_min: domain.x_min,
            x_max: domain.x_max,
            y_min: domain.y_min,
            y_max: domain.y_max,
            grid_x,
            grid_y,
            offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n_quad_sim: usize,
    pub n_quad_beyn: usize,
    pub tol_ind: f64,
    pub tol_eps: f64,
    pub tol_svd: f64,
    pub probe_count: usize,
    pub merge_tol: f64,
    pub verify_tol: f64,
    pub shift: [f64; 2],
    pub extra_levels: usize,
    pub workers: usize,
    pub inner_parallel: bool,
    pub rng_seed: u64,
}

impl From<&SolverConfig> for ConfigEcho {
    fn from(c: &SolverConfig) -> Self {
        ConfigEcho {
            n_quad_sim: c.n_quad_sim,
            n_quad_beyn: c.n_quad_beyn,
            tol_ind: c.tol_ind,
            tol_eps: c.tol_eps,
            tol_svd: c.tol_svd,
            probe_count: c.probe_count,
            merge_tol: c.merge_tol,
            verify_tol: c.verify_tol,
            shift: [c.shift.re, c.shift.im],
            extra_levels: c.extra_levels,
            workers: c.workers,
            inner_parallel: c.inner_parallel,
            rng_seed: c.rng_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub re: f64,
    pub im: f64,
    /// `null` when it could not be computed.
    pub residual: Option<f64>,
    pub method: String,
    pub disk: Option<usize>,
}

impl From<&EigenResult> for EigenEntry {
    fn from(e: &EigenResult) -> Self {
        EigenEntry {
            re: e.value.re,
            im: e.value.im,
            residual: e.residual.is_finite().then_some(e.residual),
            method: e.method.name().into(),
            disk: e.disk,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorEntry {
    pub disk_index: usize,
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
    /// `null` when the computation failed.
    pub indicator: Option<f64>,
    pub flagged: bool,
}

pub fn indicator_entries(screening: &[DiskIndicator], tol_ind: f64) -> Vec<IndicatorEntry> {
    screening
        .iter()
        .enumerate()
        .map(|(i, s)| IndicatorEntry {
            disk_index: i,
            center_re: s.disk.center().re,
            center_im: s.disk.center().im,
            radius: s.disk.radius(),
            indicator: s.indicator,
            flagged: s.flagged(tol_ind),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    /// `sim`, `beyn`, or `scan`.
    pub method: String,
    pub problem: String,
    pub region: RegionEcho,
    pub config: ConfigEcho,
    pub eigenvalues: Vec<EigenEntry>,
    /// Indicators of the initial covering.
    pub indicators: Vec<IndicatorEntry>,
    pub solve_count: u64,
    pub levels: usize,
    pub warnings: Vec<String>,
    pub wall_time_seconds: f64,
}

impl RunReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        method: &str,
        problem: &str,
        region: RegionEcho,
        config: &SolverConfig,
        eigenvalues: &[EigenResult],
        diagnostics: &RunDiagnostics,
        wall_time_seconds: f64,
    ) -> Self {
        RunReport {
            method: method.into(),
            problem: problem.into(),
            region,
            config: config.into(),
            eigenvalues: eigenvalues.iter().map(EigenEntry::from).collect(),
            indicators: indicator_entries(&diagnostics.screening, config.tol_ind),
            solve_count: diagnostics.solves,
            levels: diagnostics.levels,
            warnings: diagnostics.warnings.iter().map(describe_warning).collect(),
            wall_time_seconds,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// The eigenvalue list alone, as compact JSON.
    pub fn eigenvalue_section(&self) -> String {
        serde_json::to_string(&self.eigenvalues).expect("reports serialize")
    }
}

pub fn describe_warning(w: &Warning) -> String {
    match w {
        Warning::IllConditioned { center, radius, solves } => {
            format!("disk at {center} (radius {radius}): {solves} near-singular quadrature solves")
        }
        Warning::RotatedRule { center, radius } => {
            format!("disk at {center} (radius {radius}): singular quadrature node, rule rotated")
        }
        Warning::DiskFailed { center, radius, error } => {
            format!("disk at {center} (radius {radius}) treated as empty: {error}")
        }
        Warning::RankSaturated { disk, rank } => format!(
            "disk {disk}: all {rank} singular values above tol_svd; increase the probe count or refine the grid"
        ),
        Warning::EmptyExtraction { disk } => {
            format!("disk {disk}: flagged by the indicator but the moments have rank zero")
        }
        Warning::VerificationFailed { value, error } => format!("candidate {value} rejected: {error}"),
        Warning::EigenvectorFailed { value, error } => format!("no eigenvector for {value}: {error}"),
        Warning::EdgeRecovered { value } => format!("{value} recovered from a shared square edge"),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn eigenvalues_csv(entries: &[EigenEntry]) -> String {
    let mut out = String::from("re,im,residual,method,disk\n");
    for e in entries {
        let disk = e.disk.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", e.re, e.im, opt(e.residual), e.method, disk);
    }
    out
}

pub fn indicators_csv(entries: &[IndicatorEntry]) -> String {
    let mut out = String::from("disk_index,center_re,center_im,radius,indicator,flagged\n");
    for e in entries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.disk_index,
            e.center_re,
            e.center_im,
            e.radius,
            opt(e.indicator),
            e.flagged
        );
    }
    out
}

/// One verified candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub re: f64,
    pub im: f64,
    pub residual: Option<f64>,
    pub accepted: bool,
    pub error: Option<String>,
}

pub fn verify_csv(entries: &[VerifyEntry]) -> String {
    let mut out = String::from("re,im,residual,accepted,error\n");
    for e in entries {
        let err = e.error.as_deref().unwrap_or("").replace(',', ";");
        let _ = writeln!(out, "{},{},{},{},{}", e.re, e.im, opt(e.residual), e.accepted, err);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nepcim_core::problems::appendix_qep;
    use nepcim_core::{cover_rectangle, run_pmcimb, Sequential};

    #[test]
    fn json_round_trip_is_idempotent() {
        let domain = Rectangle::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let covering = cover_rectangle(&domain, 3, 3).unwrap();
        let cfg = SolverConfig::default();
        let out = run_pmcimb(&appendix_qep(), &covering, &cfg, &Sequential).unwrap();
        let report = RunReport::new(
            "beyn",
            "appendix",
            RegionEcho::new(&domain, 3, 3, [0.0, 0.0]),
            &cfg,
            &out.eigenvalues,
            &out.diagnostics,
            0.125,
        );
        let text = report.to_json();
        let back = RunReport::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn csv_layout() {
        let entries = vec![EigenEntry { re: 0.5, im: -1.0, residual: None, method: "sim".into(), disk: None }];
        assert_eq!(eigenvalues_csv(&entries), "re,im,residual,method,disk\n0.5,-1,,sim,\n");
    }
}

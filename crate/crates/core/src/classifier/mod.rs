//! Numeric one-component classification.
//!
//! The main test scans dyadic top halves and records the largest `|Θ(z)|` over points whose
//! Carleson square carries `μ(Θ)` mass. Radial, sawtooth and density tests cover the special
//! structures and are cross-checked against the scan by [`classify`].

mod levelset;
mod limits;
mod scan;

use num_complex::Complex64;

pub use levelset::{
    level_set_components, level_set_components_with, locate_cell, render_pgm, LevelCell,
    LevelSetAnalysis, CENTRAL_RADIUS, DEFAULT_SUBDIVISIONS,
};
pub use limits::{
    default_radial_grid, default_sawtooth_levels, density_test, radial_limit_test,
    sawtooth_samples, sawtooth_test, DensityRecord, DensityVerdict, LimitRecord,
};
pub use scan::{criterion_scan, scan_points, scan_radius, MAX_SCAN_DEPTH};

use crate::error::{Error, Result};
use crate::geometry::StolzAngle;
use crate::inner::InnerFunction;
use crate::measures::SingularMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    OneComponentEvidence,
    NotOneComponentEvidence,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::OneComponentEvidence => "OneComponentEvidence",
            Verdict::NotOneComponentEvidence => "NotOneComponentEvidence",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_definite(&self) -> bool {
        *self != Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub depth: u32,
    /// Stabilization tolerance; also the distance from 1 that counts as "reaching 1".
    pub tol: f64,
    /// `C*` must stay below `1 - margin` for a one-component verdict.
    pub margin: f64,
    /// Absolute tolerance for each certified `|Θ|`.
    pub eval_tol: f64,
    /// Rotation applied to every scan grid.
    pub angle_offset: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            depth: 16,
            tol: 1e-3,
            margin: 0.05,
            eval_tol: 1e-9,
            angle_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub depth: u32,
    pub z: Complex64,
    pub mod_theta: f64,
    pub mu_q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthRecord {
    pub depth: u32,
    pub boxes_with_mass: usize,
    /// Largest `|Θ|` among this depth's charged scan points.
    pub depth_max: Option<f64>,
    /// Running maximum through this depth.
    pub c_star: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TestRecords {
    pub radial: Option<LimitRecord>,
    pub sawtooth: Option<LimitRecord>,
    pub density: Option<DensityRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    /// Verdict of the criterion scan alone.
    pub scan_verdict: Verdict,
    pub c_star: f64,
    /// Per-depth argmax witnesses.
    pub witnesses: Vec<Witness>,
    pub depth_trace: Vec<DepthRecord>,
    pub tests: TestRecords,
    pub config: ScanConfig,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    fn new(config: ScanConfig) -> Self {
        ClassificationReport {
            verdict: Verdict::Inconclusive,
            scan_verdict: Verdict::Inconclusive,
            c_star: 0.0,
            witnesses: Vec::new(),
            depth_trace: Vec::new(),
            tests: TestRecords::default(),
            config,
            notes: Vec::new(),
        }
    }
}

/// Threshold used by [`classify`] for the density test.
pub const DEFAULT_DENSITY_THRESHOLD: f64 = 0.1;

/// Stolz aperture enclosing every materialized zero around `vertex`, if one exists.
fn stolz_aperture(theta: &InnerFunction, vertex: f64) -> Option<f64> {
    let zeros = theta.zeros()?;
    let v = Complex64::from_polar(1.0, vertex);
    let mut worst: f64 = 1.0;
    for z in zeros.prefix(zeros.available().min(1 << 16)) {
        let ratio = (z - v).norm() / (1.0 - z.norm());
        if !ratio.is_finite() {
            return None;
        }
        worst = worst.max(ratio);
    }
    Some(1.5 * worst)
}

fn density_sample(sigma: &SingularMeasure) -> Vec<f64> {
    match sigma {
        SingularMeasure::Atomic(a) => a.support_points(),
        SingularMeasure::Cantor(c) => c
            .generation(6)
            .into_iter()
            .flat_map(|a| [a, a + c.length(6)])
            .collect(),
        SingularMeasure::Cdf(c) => c
            .increasing_intervals()
            .into_iter()
            .flat_map(|(a, b)| [a, 0.5 * (a + b), b])
            .collect(),
    }
}

/// Criterion scan followed by whichever specialized tests apply; disagreement between definite
/// verdicts downgrades the result to `Inconclusive`.
pub fn classify(theta: &InnerFunction, cfg: &ScanConfig) -> Result<ClassificationReport> {
    let mut report = criterion_scan(theta, cfg)?;
    if theta.is_constant() {
        return Ok(report);
    }
    let mut tests = TestRecords::default();

    if let Some(zeros) = theta.zeros().filter(|z| z.is_infinite()) {
        if let [vertex] = zeros.accumulation()[..] {
            if theta.sigma().is_none() {
                if let Some(aperture) = stolz_aperture(theta, vertex) {
                    let stolz = StolzAngle::new(vertex, aperture)?;
                    match radial_limit_test(theta, &stolz, &default_radial_grid(), cfg) {
                        Ok(r) => tests.radial = Some(r),
                        Err(e) => report.notes.push(format!("radial test skipped: {e}")),
                    }
                }
            }
        }
    }

    if let Some(sigma) = theta.sigma() {
        match sawtooth_test(theta, &default_sawtooth_levels(cfg.depth), cfg) {
            Ok(r) => tests.sawtooth = Some(r),
            Err(Error::HypothesisViolated(m)) => report.notes.push(format!("sawtooth test skipped: {m}")),
            Err(e) => return Err(e),
        }
        if theta.zeros().is_none() {
            tests.density = Some(density_test(
                sigma,
                &density_sample(sigma),
                DEFAULT_DENSITY_THRESHOLD,
                None,
            )?);
        }
    }

    let mut verdict = report.scan_verdict;
    let special = [&tests.radial, &tests.sawtooth]
        .into_iter()
        .flatten()
        .map(|r| r.verdict)
        .chain(
            tests
                .density
                .iter()
                .filter(|d| d.verdict == DensityVerdict::SufficientConditionMet)
                .map(|_| Verdict::OneComponentEvidence),
        );
    for v in special {
        if v.is_definite() && v != verdict {
            report.notes.push(format!(
                "specialized test reports {} against scan {}",
                v.as_str(),
                report.scan_verdict.as_str()
            ));
            verdict = Verdict::Inconclusive;
        }
    }
    report.verdict = verdict;
    report.tests = tests;
    Ok(report)
}

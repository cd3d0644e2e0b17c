use num_complex::Complex64;
use rayon::prelude::*;

use super::{ScanConfig, Verdict};
use crate::boundary::SawtoothRegion;
use crate::error::{Error, Result};
use crate::geometry::StolzAngle;
use crate::inner::InnerFunction;
use crate::measures::{default_density_grid, SingularMeasure};

/// Most zeros checked against a declared region before a test runs.
const HYPOTHESIS_CHECK_CAP: usize = 1 << 16;

/// Boundary-limit estimate from sampled levels `(level, sup |Θ| there)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRecord {
    pub samples: Vec<(f64, f64)>,
    /// Maximum over the outer half of the levels.
    pub sup_estimate: f64,
    /// Maximum over all levels.
    pub sup_all: f64,
    pub stabilized: bool,
    pub verdict: Verdict,
}

impl LimitRecord {
    fn from_samples(mut samples: Vec<(f64, f64)>, cfg: &ScanConfig) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::InvalidInput("need at least 4 sample levels".into()));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        let max = |s: &[(f64, f64)]| s.iter().map(|x| x.1).fold(0.0, f64::max);
        let n = samples.len();
        let tail = &samples[n / 2..];
        let sup_estimate = max(tail);
        let h = tail.len() / 2;
        let stabilized = max(&tail[h..]) <= max(&tail[..h]) + cfg.tol;
        let verdict = if sup_estimate >= 1.0 - cfg.tol {
            Verdict::NotOneComponentEvidence
        } else if sup_estimate <= 1.0 - cfg.margin && stabilized {
            Verdict::OneComponentEvidence
        } else {
            Verdict::Inconclusive
        };
        Ok(LimitRecord {
            sup_all: max(&samples),
            samples,
            sup_estimate,
            stabilized,
            verdict,
        })
    }
}

/// `r = 1 - 2^{-t}` for `t = 6, 6 + 1/8, ..., 22`.
pub fn default_radial_grid() -> Vec<f64> {
    (0..=128).map(|i| 1.0 - (-(6.0 + i as f64 / 8.0)).exp2()).collect()
}

/// `limsup_{r→1} |Θ(re^{iθ})|` for zeros confined to a Stolz angle at `θ`.
pub fn radial_limit_test(
    theta: &InnerFunction,
    stolz: &StolzAngle,
    r_grid: &[f64],
    cfg: &ScanConfig,
) -> Result<LimitRecord> {
    let zeros = theta
        .zeros()
        .filter(|z| z.is_infinite())
        .ok_or(Error::FiniteZeroSet)?;
    let checked = zeros.prefix(zeros.available().min(HYPOTHESIS_CHECK_CAP));
    if let Some(index) = checked.iter().position(|z| !stolz.contains(*z)) {
        return Err(Error::NotStolz { index });
    }
    let samples = r_grid
        .par_iter()
        .map(|&r| {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::Domain(format!("radius {r} outside [0, 1)")));
            }
            let z = Complex64::from_polar(r, stolz.vertex_angle);
            Ok((r, theta.modulus_bounds(z, cfg.eval_tol)?.hi))
        })
        .collect::<Result<Vec<_>>>()?;
    LimitRecord::from_samples(samples, cfg)
}

/// Sample points of `Ω ∩ {|z| = r}`: each support sample and the two points at the edge of
/// its tent-free window.
pub fn sawtooth_samples(region: &SawtoothRegion, r: f64) -> Result<Vec<Complex64>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("level {r} outside (0, 1)")));
    }
    let gap = 1.0 - r;
    // chord ≤ gap/2  ⟺  angle ≤ 2 asin(gap/4)
    let half = 2.0 * (0.25 * gap).asin() * (1.0 - 1e-9);
    let mut out = Vec::new();
    for p in region.support.sample_points(0.5 * gap) {
        for t in [p - half, p, p + half] {
            let z = Complex64::from_polar(r, t);
            if region.contains(z)? {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// `r = 1 - 2^{-k}` for `k = 3..=depth`.
pub fn default_sawtooth_levels(depth: u32) -> Vec<f64> {
    (3..=depth.max(6)).map(|k| 1.0 - (-(k as f64)).exp2()).collect()
}

/// `limsup |Θ(z)|` as `z → ∂D` inside the sawtooth region over `supp σ`.
pub fn sawtooth_test(theta: &InnerFunction, r_levels: &[f64], cfg: &ScanConfig) -> Result<LimitRecord> {
    let sigma = theta
        .sigma()
        .ok_or_else(|| Error::HypothesisViolated("no singular part".into()))?;
    let region = SawtoothRegion::new(sigma.support());
    if let Some(zeros) = theta.zeros() {
        for (i, z) in zeros
            .prefix(zeros.available().min(HYPOTHESIS_CHECK_CAP))
            .into_iter()
            .enumerate()
        {
            if z.norm() == 0.0 || !region.contains(z)? {
                return Err(Error::HypothesisViolated(format!(
                    "zero {i} lies outside the sawtooth region"
                )));
            }
        }
    }
    let mut samples = Vec::with_capacity(r_levels.len());
    for &r in r_levels {
        let pts = sawtooth_samples(&region, r)?;
        let sup = pts
            .par_iter()
            .map(|z| Ok(theta.modulus_bounds(*z, cfg.eval_tol)?.hi))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        samples.push((r, sup));
    }
    LimitRecord::from_samples(samples, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityVerdict {
    SufficientConditionMet,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityRecord {
    /// `(ξ, grid liminf surrogate)` per sample.
    pub densities: Vec<(f64, f64)>,
    pub threshold: f64,
    pub verdict: DensityVerdict,
}

/// Sufficient density condition at the sampled support points.
pub fn density_test(
    sigma: &SingularMeasure,
    support_sample: &[f64],
    threshold: f64,
    h_grid: Option<&[f64]>,
) -> Result<DensityRecord> {
    let default = default_density_grid();
    let grid = h_grid.unwrap_or(&default);
    let densities = support_sample
        .iter()
        .map(|&xi| Ok((xi, sigma.density_liminf(xi, grid)?)))
        .collect::<Result<Vec<_>>>()?;
    let met = !densities.is_empty() && densities.iter().all(|d| d.1 >= threshold);
    Ok(DensityRecord {
        densities,
        threshold,
        verdict: if met {
            DensityVerdict::SufficientConditionMet
        } else {
            DensityVerdict::Inconclusive
        },
    })
}

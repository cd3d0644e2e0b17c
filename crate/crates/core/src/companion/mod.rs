//! Companion interpolating Blaschke products.
//!
//! Given `Θ`, the Whitney arcs of `∂D \ sing Θ` get radii `r_n` with `|Θ| ≥ 1 - ε_n` on the
//! sector above `r_n`. The arcs `{r_n e^{it}}` joined by radial connectors form `Γ`, and zeros
//! marched along `Γ` at pseudohyperbolic spacing `1/10` define `B`.

mod chain;
mod gamma;
mod place;

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

pub use chain::{choose_radii, default_epsilon, grid_radius, ChainArc, WhitneyChain, MAX_RADIUS_EXPONENT};
pub use gamma::{build_gamma, GammaChain, GammaCurve, GammaPiece};
pub use place::{place_zeros, Placement};

use crate::classifier::{criterion_scan, scan_points, ClassificationReport, ScanConfig, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{rho, wrap_positive, CarlesonSquare, WhitneyBox};
use crate::inner::{separation_constants, InnerFunction, SeparationReport, ZeroSequence};

/// Pseudohyperbolic spacing of consecutive zeros.
pub const SPACING: f64 = 0.1;
/// `|B(z)| > 12/21` forces `Q(z)` to be free of zeros of `B`.
pub const MECHANISM_THRESHOLD: f64 = 12.0 / 21.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CompanionConfig {
    /// Number of zeros retained.
    pub horizon: usize,
    /// Depth of the verification scans.
    pub depth: u32,
    /// First Whitney cutoff level tried; arcs shorter than `2π·2^{-level}` are dropped.
    pub start_level: u32,
    pub max_level: u32,
    /// Absolute tolerance of every certified `|B|`, `|BΘ|` in the verification.
    pub eval_tol: f64,
}

impl Default for CompanionConfig {
    fn default() -> Self {
        CompanionConfig {
            horizon: 2000,
            depth: 14,
            start_level: 4,
            max_level: 40,
            eval_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub spacing_pairs: usize,
    /// `max |ρ(z_k, z_{k+1}) - 1/10|` over consecutive zeros.
    pub spacing_error: f64,
    pub spacing_ok: bool,
    pub separation: SeparationReport,
    pub separation_ok: bool,
    pub scan_b: ClassificationReport,
    pub scan_b_theta: ClassificationReport,
    pub mechanism_points: usize,
    /// Scan points with `|B| > 12/21` whose Carleson square holds a zero.
    pub mechanism_violations: Vec<Complex64>,
    /// Every materialized zero of `Θ` above an arc lies below `Γ`.
    pub theta_zeros_below: bool,
    /// `max |B|` sampled just below completely retained arcs of `Γ`.
    pub c_b: f64,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.spacing_ok
            && self.separation_ok
            && self.scan_b.verdict == Verdict::OneComponentEvidence
            && self.scan_b_theta.verdict == Verdict::OneComponentEvidence
            && self.mechanism_violations.is_empty()
            && self.theta_zeros_below
            && self.c_b < 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Companion {
    pub zeros: Vec<Complex64>,
    pub chain: WhitneyChain,
    pub gamma: GammaCurve,
    pub cutoff_level: u32,
    /// Deepest cutoff still ran out of curve before `horizon` zeros.
    pub exhausted: bool,
    /// Rough size of `Σ (1 - |z|)` over the zeros not retained.
    pub tail_estimate: f64,
    /// Left endpoints of the chains of `Γ` in boundary order.
    pub connector_order: Vec<f64>,
    pub verification: Verification,
}

impl Companion {
    pub fn blaschke(&self) -> Result<InnerFunction> {
        InnerFunction::finite_blaschke(self.zeros.clone())
    }
}

fn chain_start_angle(c: &GammaChain) -> f64 {
    match c.pieces[0] {
        GammaPiece::Circular { start, .. } => start,
        GammaPiece::Radial { angle, .. } => angle,
    }
}

/// Builds `Γ` at growing cutoff levels until `horizon` zeros fit, then verifies `B`.
pub fn construct_companion(theta: &InnerFunction, cfg: &CompanionConfig) -> Result<Companion> {
    if cfg.horizon < 2 {
        return Err(Error::InvalidInput("horizon must be at least 2".into()));
    }
    let sing = theta.singular_set();
    let mut cache = HashMap::new();
    let mut level = cfg.start_level.max(2);
    let (chain, gamma, placement) = loop {
        let min_len = TAU * (-(level as f64)).exp2();
        let arcs: Vec<_> = sing.whitney_arcs(min_len)?.collect();
        let chain = chain::choose_radii_cached(theta, &arcs, &default_epsilon, &mut cache)?;
        let gamma = build_gamma(&chain);
        let placement = place_zeros(&gamma, SPACING, cfg.horizon)?;
        if !placement.exhausted || level >= cfg.max_level {
            break (chain, gamma, placement);
        }
        level += 1;
    };
    if placement.zeros.len() < 2 {
        return Err(Error::CurveExhausted { placed: placement.zeros.len() });
    }

    let cut = TAU * (-(level as f64)).exp2();
    let complete: Vec<usize> = placement
        .complete_pieces
        .iter()
        .filter_map(|&(c, p)| match gamma.chains[c].pieces[p] {
            GammaPiece::Circular { arc, .. } => Some(arc),
            _ => None,
        })
        .collect();
    let incomplete_length: f64 = (0..chain.arcs.len())
        .filter(|i| !complete.contains(i))
        .map(|i| chain.arcs[i].arc.length())
        .sum();
    let tail_estimate = 5.0 * incomplete_length + 10.0 * cut * placement.open_ends as f64;

    let verification = verify(theta, &placement, &chain, &complete, cfg)?;
    Ok(Companion {
        zeros: placement.zeros,
        connector_order: gamma.chains.iter().map(chain_start_angle).collect(),
        chain,
        gamma,
        cutoff_level: level,
        exhausted: placement.exhausted,
        tail_estimate,
        verification,
    })
}

fn verify(
    theta: &InnerFunction,
    placement: &Placement,
    chain: &WhitneyChain,
    complete: &[usize],
    cfg: &CompanionConfig,
) -> Result<Verification> {
    let zeros = &placement.zeros;
    let spacing_error = placement
        .pairs
        .iter()
        .map(|&(i, j)| (rho(zeros[i], zeros[j]) - SPACING).abs())
        .fold(0.0, f64::max);

    let seq = ZeroSequence::finite(zeros.clone())?;
    let separation = separation_constants(&seq, zeros.len())?;
    let separation_ok = separation.delta > 0.0 && separation.box_constant.is_finite();

    let b = InnerFunction::finite_blaschke(zeros.clone())?;
    let b_theta = theta.times_finite_blaschke(zeros)?;
    let scan_cfg = ScanConfig {
        depth: cfg.depth,
        eval_tol: cfg.eval_tol,
        ..ScanConfig::default()
    };
    let scan_b = criterion_scan(&b, &scan_cfg)?;
    let scan_b_theta = criterion_scan(&b_theta, &scan_cfg)?;

    let mu = b.mu(zeros.len());
    let points: Vec<Complex64> = (2..=cfg.depth)
        .flat_map(|n| (0..1u64 << n).map(move |k| (n, k)))
        .map(|(n, k)| WhitneyBox::new(n, k))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .flat_map(|bx| scan_points(*bx, 0.0))
        .collect();
    let mechanism_violations = points
        .par_iter()
        .map(|&z| {
            let m = b.modulus_bounds(z, cfg.eval_tol)?;
            if m.lo > MECHANISM_THRESHOLD && mu.has_mass(&CarlesonSquare::of_complex(z))? {
                Ok(Some(z))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let theta_zeros = theta
        .zeros()
        .map(|z| z.prefix(z.available().min(1 << 16)))
        .unwrap_or_default();
    let theta_zeros_below = theta_zeros.iter().all(|z| {
        let t = wrap_positive(z.im.atan2(z.re));
        chain
            .arcs
            .iter()
            .filter(|c| t >= c.arc.start() && t <= c.arc.end())
            .all(|c| z.norm() < c.radius)
    });

    let samples: Vec<Complex64> = complete
        .iter()
        .flat_map(|&i| {
            let c = chain.arcs[i];
            (0..4).flat_map(move |k| {
                let r = (c.radius - k as f64 * 0.5 * (1.0 - c.radius)).max(0.0);
                (0..17).map(move |j| {
                    Complex64::from_polar(r, c.arc.start() + c.arc.length() * (j as f64 + 0.5) / 17.0)
                })
            })
        })
        .collect();
    let c_b = samples
        .par_iter()
        .map(|&z| Ok(b.modulus_bounds(z, cfg.eval_tol)?.hi))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    Ok(Verification {
        spacing_pairs: placement.pairs.len(),
        spacing_error,
        spacing_ok: spacing_error < 1e-6,
        separation,
        separation_ok,
        scan_b,
        scan_b_theta,
        mechanism_points: points.len(),
        mechanism_violations,
        theta_zeros_below,
        c_b,
    })
}

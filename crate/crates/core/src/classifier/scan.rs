use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{ClassificationReport, DepthRecord, ScanConfig, Verdict, Witness};
use crate::error::{Error, Result};
use crate::geometry::{CarlesonSquare, WhitneyBox};
use crate::inner::{InnerFunction, MuMeasure};

pub const MAX_SCAN_DEPTH: u32 = 26;

/// Angular positions of the scan points inside a top half, as fractions of the box width.
const SCAN_FRACTIONS: [f64; 3] = [1.0 / 6.0, 0.5, 5.0 / 6.0];

/// Modulus of the scan points at depth `n`: the radial middle of the top half.
pub fn scan_radius(depth: u32) -> f64 {
    1.0 - 3.0 * PI * (-(depth as f64) - 2.0).exp2()
}

/// Scan points of the top half of `b`, rotated by `offset`.
pub fn scan_points(b: WhitneyBox, offset: f64) -> [Complex64; 3] {
    let r = scan_radius(b.depth);
    SCAN_FRACTIONS.map(|f| Complex64::from_polar(r, offset + b.angle_start() + f * b.angle_width()))
}

struct Hit {
    z: Complex64,
    modulus: f64,
}

/// Largest certified `|Θ(z)|` over scan points with `μ(Q(z)) > 0`, per depth.
pub fn criterion_scan(theta: &InnerFunction, cfg: &ScanConfig) -> Result<ClassificationReport> {
    if cfg.depth < 2 || cfg.depth > MAX_SCAN_DEPTH {
        return Err(Error::InvalidInput(format!(
            "scan depth {} outside 2..={MAX_SCAN_DEPTH}",
            cfg.depth
        )));
    }
    if !(cfg.tol > 0.0 && cfg.tol < 1.0) || !(cfg.margin > 0.0 && cfg.margin < 1.0) {
        return Err(Error::InvalidInput("tolerances must lie in (0, 1)".into()));
    }
    if theta.is_constant() {
        let mut report = ClassificationReport::new(cfg.clone());
        report.verdict = Verdict::OneComponentEvidence;
        report.scan_verdict = Verdict::OneComponentEvidence;
        report.notes.push("constant".into());
        return Ok(report);
    }

    let mu = MuMeasure::for_min_side(theta, 1.0 - scan_radius(cfg.depth))?;
    let mut trace = Vec::new();
    let mut witnesses = Vec::new();
    let mut c_star: f64 = 0.0;
    for n in 2..=cfg.depth {
        let hits: Vec<Option<Hit>> = (0..1u64 << n)
            .into_par_iter()
            .map(|k| -> Result<Option<Hit>> {
                let b = WhitneyBox { depth: n, index: k };
                let mut best: Option<Hit> = None;
                for z in scan_points(b, cfg.angle_offset) {
                    if !mu.has_mass(&CarlesonSquare::of_complex(z))? {
                        continue;
                    }
                    let m = theta.modulus_bounds(z, cfg.eval_tol)?.hi;
                    if best.as_ref().map_or(true, |h| m > h.modulus) {
                        best = Some(Hit { z, modulus: m });
                    }
                }
                Ok(best)
            })
            .collect::<Result<_>>()?;
        let mut depth_best: Option<&Hit> = None;
        let mut boxes = 0usize;
        for h in hits.iter().flatten() {
            boxes += 1;
            if depth_best.map_or(true, |b| h.modulus > b.modulus) {
                depth_best = Some(h);
            }
        }
        let depth_max = depth_best.map(|h| h.modulus);
        if let Some(h) = depth_best {
            c_star = c_star.max(h.modulus);
            let q = CarlesonSquare::of_complex(h.z);
            witnesses.push(Witness {
                depth: n,
                z: h.z,
                mod_theta: h.modulus,
                mu_q: mu.mu_of_square(&q, 1e-10)?,
            });
        }
        trace.push(DepthRecord {
            depth: n,
            boxes_with_mass: boxes,
            depth_max,
            c_star,
        });
    }

    let mut report = ClassificationReport::new(cfg.clone());
    report.c_star = c_star;
    report.scan_verdict = scan_verdict(&trace, cfg);
    report.verdict = report.scan_verdict;
    report.depth_trace = trace;
    report.witnesses = witnesses;
    Ok(report)
}

fn scan_verdict(trace: &[DepthRecord], cfg: &ScanConfig) -> Verdict {
    let Some(last) = trace.last() else {
        return Verdict::Inconclusive;
    };
    let c = last.c_star;
    let back = trace.len().saturating_sub(3);
    let stabilized = c - trace[back].c_star < cfg.tol;
    let maxima: Vec<f64> = trace.iter().filter_map(|d| d.depth_max).collect();
    let tail = &maxima[maxima.len().saturating_sub(3)..];
    let monotone = tail.len() >= 2 && tail.windows(2).all(|w| w[1] >= w[0]);
    if c > 1.0 - cfg.tol && monotone {
        Verdict::NotOneComponentEvidence
    } else if c <= 1.0 - cfg.margin && stabilized {
        Verdict::OneComponentEvidence
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AtomicMeasure;

    fn cfg(depth: u32) -> ScanConfig {
        ScanConfig {
            depth,
            ..ScanConfig::default()
        }
    }

    #[test]
    fn scan_points_lie_in_top_half() {
        for (n, k) in [(2u32, 0u64), (5, 17), (12, 4095)] {
            let b = WhitneyBox::new(n, k).unwrap();
            for z in scan_points(b, 0.0) {
                assert!(b.in_top_half(z));
            }
        }
    }

    #[test]
    fn dyadic_angle_mass_is_seen() {
        // every depth has a scan point whose square reaches angle 0
        for n in 2..20u32 {
            let b = WhitneyBox::new(n, 0).unwrap();
            let q = CarlesonSquare::of_complex(scan_points(b, 0.0)[0]);
            assert!(q.member(Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn single_atom_is_one_component() {
        let th = InnerFunction::singular(AtomicMeasure::unit_atom(0.0).into());
        let r = criterion_scan(&th, &cfg(10)).unwrap();
        assert_eq!(r.verdict, Verdict::OneComponentEvidence);
        assert!(r.c_star < 0.5);
        let trace: Vec<f64> = r.depth_trace.iter().map(|d| d.c_star).collect();
        assert!(trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn finite_blaschke_is_one_component() {
        let th = InnerFunction::finite_blaschke(vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)])
            .unwrap();
        let r = criterion_scan(&th, &cfg(10)).unwrap();
        assert_eq!(r.verdict, Verdict::OneComponentEvidence);
        assert!(r.c_star > 0.0 && r.c_star < 0.95);
    }

    #[test]
    fn constant_has_empty_scan() {
        let th = InnerFunction::constant(Complex64::new(0.0, 1.0)).unwrap();
        let r = criterion_scan(&th, &cfg(8)).unwrap();
        assert_eq!(r.verdict, Verdict::OneComponentEvidence);
        assert_eq!(r.c_star, 0.0);
        assert_eq!(r.notes, vec!["constant".to_string()]);
    }
}

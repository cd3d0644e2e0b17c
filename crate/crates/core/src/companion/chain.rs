use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::boundary::WhitneyArc;
use crate::error::{Error, Result};
use crate::inner::InnerFunction;

/// Largest `k` in the radius grid `1 - 2^{-k}`.
pub const MAX_RADIUS_EXPONENT: u32 = 50;
/// Extra dyadic radii sampled above a candidate radius.
const RADIAL_SAMPLES: u32 = 13;
const ANGULAR_SAMPLES: usize = 65;
/// Evaluation tolerance as a fraction of `ε`.
const SEARCH_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainArc {
    pub arc: WhitneyArc,
    pub epsilon: f64,
    /// `radius = 1 - 2^{-k}`.
    pub k: u32,
    pub radius: f64,
}

/// Whitney arcs of `∂D \ sing Θ` in boundary order with their radii.
#[derive(Debug, Clone, PartialEq)]
pub struct WhitneyChain {
    pub arcs: Vec<ChainArc>,
}

/// `ε_n = min(1/2, |I_n|)`.
pub fn default_epsilon(arc: &WhitneyArc) -> f64 {
    arc.length().min(0.5)
}

pub fn grid_radius(k: u32) -> f64 {
    1.0 - (-(k as f64)).exp2()
}

fn radius_passes(
    theta: &InnerFunction,
    zeros: &[Complex64],
    arc: &WhitneyArc,
    epsilon: f64,
    k: u32,
) -> Result<bool> {
    let r = grid_radius(k);
    let (a, len) = (arc.start(), arc.length());
    for z in zeros {
        let t = crate::geometry::wrap_positive(z.im.atan2(z.re));
        if t >= a && t <= a + len && z.norm() >= r {
            return Ok(false);
        }
    }
    for j in k..(k + RADIAL_SAMPLES).min(MAX_RADIUS_EXPONENT + 1) {
        let rr = grid_radius(j);
        for i in 0..ANGULAR_SAMPLES {
            let t = a + len * i as f64 / (ANGULAR_SAMPLES - 1) as f64;
            let lo = theta.modulus_bounds(Complex64::from_polar(rr, t), SEARCH_TOL * epsilon)?.lo;
            if lo < 1.0 - epsilon {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Smallest grid exponent whose sampled sector certifies `|Θ| ≥ 1 - ε` (galloping, then
/// bisection).
fn search_radius(theta: &InnerFunction, zeros: &[Complex64], arc: &WhitneyArc, epsilon: f64, index: usize) -> Result<u32> {
    let pass = |k| radius_passes(theta, zeros, arc, epsilon, k);
    if pass(1)? {
        return Ok(1);
    }
    let (mut lo, mut hi) = (1u32, 2u32);
    while !pass(hi)? {
        if hi == MAX_RADIUS_EXPONENT {
            return Err(Error::RadiusSearchExhausted { arc: index });
        }
        lo = hi;
        hi = (2 * hi).min(MAX_RADIUS_EXPONENT);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if pass(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Picks `r_n` for every arc; `cache` carries results between calls with growing arc sets.
pub(crate) fn choose_radii_cached(
    theta: &InnerFunction,
    arcs: &[WhitneyArc],
    epsilon: &(dyn Fn(&WhitneyArc) -> f64 + Sync),
    cache: &mut HashMap<(u32, u64), ChainArc>,
) -> Result<WhitneyChain> {
    let zeros = theta
        .zeros()
        .map(|z| z.prefix(z.available().min(1 << 16)))
        .unwrap_or_default();
    let missing: Vec<(usize, WhitneyArc)> = arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| !cache.contains_key(&(a.level, a.index)))
        .map(|(i, a)| (i, *a))
        .collect();
    let found = missing
        .par_iter()
        .map(|(i, arc)| {
            let eps = epsilon(arc);
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::InvalidInput(format!("ε = {eps} outside (0, 1) on arc {i}")));
            }
            let k = search_radius(theta, &zeros, arc, eps, *i)?;
            Ok(ChainArc {
                arc: *arc,
                epsilon: eps,
                k,
                radius: grid_radius(k),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for c in found {
        cache.insert((c.arc.level, c.arc.index), c);
    }
    Ok(WhitneyChain {
        arcs: arcs.iter().map(|a| cache[&(a.level, a.index)]).collect(),
    })
}

/// Radii `r_n` for arcs given in boundary order.
pub fn choose_radii(
    theta: &InnerFunction,
    arcs: &[WhitneyArc],
    epsilon: &(dyn Fn(&WhitneyArc) -> f64 + Sync),
) -> Result<WhitneyChain> {
    choose_radii_cached(theta, arcs, epsilon, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundarySet;
    use crate::measures::AtomicMeasure;

    #[test]
    fn constant_takes_smallest_radius() {
        let th = InnerFunction::constant(Complex64::new(1.0, 0.0)).unwrap();
        let arcs: Vec<_> = BoundarySet::Empty.whitney_arcs(0.1).unwrap().collect();
        let chain = choose_radii(&th, &arcs, &default_epsilon).unwrap();
        assert!(chain.arcs.iter().all(|a| a.k == 1));
    }

    #[test]
    fn atom_radius_is_certified() {
        let th = InnerFunction::singular(AtomicMeasure::unit_atom(0.0).into());
        let e = th.singular_set();
        let arcs: Vec<_> = e.whitney_arcs(0.05).unwrap().collect();
        let chain = choose_radii(&th, &arcs, &default_epsilon).unwrap();
        for c in &chain.arcs {
            // a posteriori: interior samples off the search grid
            for i in 0..10 {
                let t = c.arc.start() + c.arc.length() * (i as f64 + 0.5) / 10.0;
                for r in [c.radius, 0.5 * (1.0 + c.radius)] {
                    let m = th.modulus_bounds(Complex64::from_polar(r, t), 1e-12).unwrap().lo;
                    assert!(m >= 1.0 - c.epsilon - 1e-9, "arc {:?}", c.arc);
                }
            }
            // the kernel bound forces 1 - r ≲ ε·dist
            let d = e.distance_to_arc(c.arc.start(), c.arc.length());
            assert!(1.0 - c.radius <= 2.0 * c.epsilon * d + 1e-12);
        }
    }

    #[test]
    fn finite_blaschke_zeros_stay_below() {
        let zs = vec![Complex64::from_polar(0.9, 0.3), Complex64::from_polar(0.97, 2.0)];
        let th = InnerFunction::finite_blaschke(zs.clone()).unwrap();
        let arcs: Vec<_> = BoundarySet::Empty.whitney_arcs(0.1).unwrap().collect();
        let chain = choose_radii(&th, &arcs, &default_epsilon).unwrap();
        for z in zs {
            let t = crate::geometry::wrap_positive(z.im.atan2(z.re));
            let c = chain
                .arcs
                .iter()
                .find(|c| t >= c.arc.start() && t <= c.arc.end())
                .unwrap();
            assert!(c.radius > z.norm());
        }
    }
}

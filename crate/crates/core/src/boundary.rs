//! Closed subsets of the circle, their Whitney decompositions, and sawtooth regions.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{wrap_positive, BoundaryArc};
use crate::measures::CantorMeasure;

/// A closed set `E ⊂ ∂D`.
#[derive(Debug, Clone)]
pub enum BoundarySet {
    Empty,
    /// Finitely many points (angles).
    Points(Vec<f64>),
    /// Closed arcs given as `(start, length)`, counter-clockwise.
    Arcs(Vec<(f64, f64)>),
    Cantor(Arc<CantorMeasure>),
    Union(Vec<BoundarySet>),
}

impl BoundarySet {
    pub fn is_empty(&self) -> bool {
        match self {
            BoundarySet::Empty => true,
            BoundarySet::Points(p) => p.is_empty(),
            BoundarySet::Arcs(a) => a.is_empty(),
            BoundarySet::Cantor(_) => false,
            BoundarySet::Union(parts) => parts.iter().all(BoundarySet::is_empty),
        }
    }

    /// Upper bound on the Lebesgue length of the set.
    pub fn length(&self) -> f64 {
        match self {
            BoundarySet::Empty | BoundarySet::Points(_) => 0.0,
            BoundarySet::Arcs(a) => a.iter().map(|x| x.1).sum::<f64>().min(TAU),
            // E ⊂ E_n for every n, and |E_n| = δ_n → 0
            BoundarySet::Cantor(_) => 0.0,
            BoundarySet::Union(parts) => parts.iter().map(BoundarySet::length).sum::<f64>().min(TAU),
        }
    }

    /// Angular distance from the arc `[start, start + len]` to the set (`∞` when empty).
    pub fn distance_to_arc(&self, start: f64, len: f64) -> f64 {
        match self {
            BoundarySet::Empty => f64::INFINITY,
            BoundarySet::Points(p) => p
                .iter()
                .map(|&t| span_distance(start, len, t))
                .fold(f64::INFINITY, f64::min),
            BoundarySet::Arcs(a) => a
                .iter()
                .map(|&(s, l)| arc_arc_distance(start, len, s, l))
                .fold(f64::INFINITY, f64::min),
            BoundarySet::Cantor(c) => c.distance_to_arc(start, len),
            BoundarySet::Union(parts) => parts
                .iter()
                .map(|p| p.distance_to_arc(start, len))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn distance_to_point(&self, theta: f64) -> f64 {
        self.distance_to_arc(theta, 0.0)
    }

    pub fn rotated(&self, alpha: f64) -> Result<BoundarySet> {
        Ok(match self {
            BoundarySet::Empty => BoundarySet::Empty,
            BoundarySet::Points(p) => {
                BoundarySet::Points(p.iter().map(|t| crate::geometry::wrap_angle(t + alpha)).collect())
            }
            BoundarySet::Arcs(a) => BoundarySet::Arcs(a.iter().map(|&(s, l)| (s + alpha, l)).collect()),
            BoundarySet::Cantor(_) => {
                return Err(Error::InvalidInput("Cantor sets are anchored at angle 0".into()))
            }
            BoundarySet::Union(parts) => {
                BoundarySet::Union(parts.iter().map(|p| p.rotated(alpha)).collect::<Result<_>>()?)
            }
        })
    }

    /// Dyadic Whitney decomposition of `∂D \ E`, emitted in boundary order.
    ///
    /// Circle arcs `[2πk2^{-j}, 2π(k+1)2^{-j}]` are bisected from level 2; an arc is kept
    /// when its distance to `E` is at least its length (its parent failed that test).
    /// Arcs shorter than `min_length` are not emitted. When `E` is empty the four
    /// level-2 quarter arcs are emitted.
    pub fn whitney_arcs(&self, min_length: f64) -> Result<WhitneyArcs<'_>> {
        if !(min_length > 0.0) {
            return Err(Error::InvalidInput("Whitney cutoff must be positive".into()));
        }
        if self.length() >= TAU - 1e-12 {
            return Err(Error::FullCircle);
        }
        if self.length() > 0.0 {
            return Err(Error::PositiveMeasureSet);
        }
        let stack = (0..4u64).rev().map(|k| (2u32, k)).collect();
        Ok(WhitneyArcs {
            set: self,
            stack,
            min_length,
            empty: self.is_empty(),
        })
    }

    /// Representative sample of points in the set (used for sawtooth sampling).
    pub(crate) fn sample_points(&self, resolution: f64) -> Vec<f64> {
        match self {
            BoundarySet::Empty => Vec::new(),
            BoundarySet::Points(p) => p.clone(),
            BoundarySet::Arcs(a) => a
                .iter()
                .flat_map(|&(s, l)| {
                    let n = ((l / resolution).ceil() as usize).clamp(1, 1 << 16);
                    (0..=n).map(move |i| s + l * i as f64 / n as f64)
                })
                .collect(),
            BoundarySet::Cantor(c) => cantor_endpoints(c, resolution),
            BoundarySet::Union(parts) => parts.iter().flat_map(|p| p.sample_points(resolution)).collect(),
        }
    }
}

/// Endpoints of the first generation whose intervals are shorter than `resolution`.
fn cantor_endpoints(c: &CantorMeasure, resolution: f64) -> Vec<f64> {
    let mut n = 0;
    while n < c.depth_cap() && c.length(n) > resolution && n < 22 {
        n += 1;
    }
    let l = c.length(n);
    c.generation(n)
        .into_iter()
        .flat_map(|a| [a, a + l])
        .collect()
}

fn span_distance(start: f64, len: f64, theta: f64) -> f64 {
    let off = wrap_positive(theta - start);
    if off <= len {
        0.0
    } else {
        (off - len).min(TAU - off)
    }
}

fn arc_arc_distance(s1: f64, l1: f64, s2: f64, l2: f64) -> f64 {
    span_distance(s1, l1, s2)
        .min(span_distance(s1, l1, s2 + l2))
        .min(span_distance(s2, l2, s1))
        .min(span_distance(s2, l2, s1 + l1))
}

/// One dyadic Whitney arc `[2πk2^{-level}, 2π(k+1)2^{-level}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitneyArc {
    pub level: u32,
    pub index: u64,
}

impl WhitneyArc {
    pub fn start(&self) -> f64 {
        TAU * self.index as f64 * (-(self.level as f64)).exp2()
    }

    pub fn length(&self) -> f64 {
        TAU * (-(self.level as f64)).exp2()
    }

    pub fn end(&self) -> f64 {
        self.start() + self.length()
    }

    pub fn arc(&self) -> BoundaryArc {
        BoundaryArc {
            center_angle: crate::geometry::wrap_angle(self.start() + 0.5 * self.length()),
            half_width: 0.5 * self.length(),
        }
    }

    /// Whether `other` starts exactly where `self` ends (compared as dyadic rationals).
    pub fn abuts(&self, other: &WhitneyArc) -> bool {
        let lvl = self.level.max(other.level);
        let end = (self.index + 1) << (lvl - self.level);
        let start = other.index << (lvl - other.level);
        end == start || (end == 1u64 << lvl && start == 0)
    }
}

/// Lazy depth-first Whitney decomposition.
pub struct WhitneyArcs<'a> {
    set: &'a BoundarySet,
    stack: Vec<(u32, u64)>,
    min_length: f64,
    empty: bool,
}

impl Iterator for WhitneyArcs<'_> {
    type Item = WhitneyArc;

    fn next(&mut self) -> Option<WhitneyArc> {
        while let Some((level, index)) = self.stack.pop() {
            let arc = WhitneyArc { level, index };
            if self.empty {
                return Some(arc);
            }
            let len = arc.length();
            if len < self.min_length {
                continue;
            }
            let d = self.set.distance_to_arc(arc.start(), len);
            if d >= len {
                return Some(arc);
            }
            if level < 62 {
                self.stack.push((level + 1, 2 * index + 1));
                self.stack.push((level + 1, 2 * index));
            }
        }
        None
    }
}

/// `Ω = {z : 1 - |z| ≥ 2 dist(z/|z|, supp)}` with Euclidean distance in the plane.
#[derive(Debug, Clone)]
pub struct SawtoothRegion {
    pub support: BoundarySet,
}

impl SawtoothRegion {
    pub fn new(support: BoundarySet) -> Self {
        SawtoothRegion { support }
    }

    pub fn contains(&self, z: Complex64) -> Result<bool> {
        let r = z.norm();
        if r == 0.0 || r >= 1.0 {
            return Err(Error::Domain(format!("sawtooth test needs 0 < |z| < 1, got {r}")));
        }
        let d = self.support.distance_to_point(z.im.atan2(z.re)).min(PI);
        Ok(1.0 - r >= 2.0 * 2.0 * (0.5 * d).sin())
    }
}

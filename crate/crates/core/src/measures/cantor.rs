//! Symmetric Cantor measures on `[0, 2π]`.
//!
//! Generation `n` consists of `2^n` closed intervals of length `L_n = 2^{-n}δ_n`,
//! each of mass `2^{-n}`; every interval keeps its two end pieces of length
//! `L_{n+1}` and loses the centered middle segment.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

pub const DEFAULT_DEPTH_CAP: usize = 48;

/// How the sequence `δ_n` is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaSchedule {
    /// `δ_n = 2π(2/3)^n`.
    MiddleThirds,
    /// `δ_n = 2π·ratio^n`, `0 < ratio < 1`.
    Ratio(f64),
    /// Explicit `δ_0 = 2π, δ_1, ...`; continued geometrically with the last ratio.
    Explicit(Vec<f64>),
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct TwoSum {
    pub hi: f64,
    pub lo: f64,
}

impl TwoSum {
    pub fn add(self, x: f64) -> Self {
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        let lo = self.lo + err;
        let hi = s + lo;
        TwoSum {
            hi,
            lo: lo - (hi - s),
        }
    }

    /// `x - self`, accurate when `x` is close to `self`.
    pub fn offset_of(self, x: f64) -> f64 {
        (x - self.hi) - self.lo
    }
}

#[derive(Debug, Clone)]
pub struct CantorMeasure {
    schedule: DeltaSchedule,
    /// `L_n` for `n = 0..=cap`.
    lengths: Vec<f64>,
    depth_cap: usize,
}

impl CantorMeasure {
    pub fn new(schedule: DeltaSchedule) -> Result<Self> {
        Self::with_depth_cap(schedule, DEFAULT_DEPTH_CAP)
    }

    pub fn middle_thirds() -> Self {
        Self::new(DeltaSchedule::MiddleThirds).expect("middle-thirds schedule is valid")
    }

    pub fn with_depth_cap(schedule: DeltaSchedule, depth_cap: usize) -> Result<Self> {
        if depth_cap == 0 || depth_cap > 1000 {
            return Err(Error::InvalidInput(format!("depth cap {depth_cap} out of range")));
        }
        let deltas: Vec<f64> = match &schedule {
            DeltaSchedule::MiddleThirds => (0..=depth_cap)
                .map(|n| TAU * (2.0f64 / 3.0).powi(n as i32))
                .collect(),
            DeltaSchedule::Ratio(q) => {
                if !(*q > 0.0 && *q < 1.0) {
                    return Err(Error::InvalidInput(format!("Cantor ratio {q} outside (0, 1)")));
                }
                (0..=depth_cap).map(|n| TAU * q.powi(n as i32)).collect()
            }
            DeltaSchedule::Explicit(list) => {
                if list.len() < 2 {
                    return Err(Error::InvalidInput(
                        "explicit δ sequence needs at least δ_0 and δ_1".into(),
                    ));
                }
                if (list[0] - TAU).abs() > 1e-12 {
                    return Err(Error::InvalidInput("δ_0 must equal 2π".into()));
                }
                if list.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
                    return Err(Error::InvalidInput(
                        "δ sequence must be positive and strictly decreasing".into(),
                    ));
                }
                let q = list[list.len() - 1] / list[list.len() - 2];
                let mut out: Vec<f64> = list.iter().copied().take(depth_cap + 1).collect();
                while out.len() <= depth_cap {
                    let last = out[out.len() - 1];
                    out.push(last * q);
                }
                out
            }
        };
        let lengths = deltas
            .iter()
            .enumerate()
            .map(|(n, d)| d * (-(n as f64)).exp2())
            .collect();
        Ok(CantorMeasure {
            schedule,
            lengths,
            depth_cap,
        })
    }

    pub fn schedule(&self) -> &DeltaSchedule {
        &self.schedule
    }

    pub fn depth_cap(&self) -> usize {
        self.depth_cap
    }

    /// `δ_n`.
    pub fn delta(&self, n: usize) -> f64 {
        self.length(n) * (n as f64).exp2()
    }

    /// Length `L_n = 2^{-n}δ_n` of each generation-`n` interval.
    pub fn length(&self, n: usize) -> f64 {
        self.lengths[n.min(self.depth_cap)]
    }

    /// Offset of the right child inside a generation-`n` interval.
    pub(crate) fn right_shift(&self, n: usize) -> f64 {
        self.lengths[n] - self.lengths[n + 1]
    }

    pub fn total_mass(&self) -> f64 {
        1.0
    }

    /// Left endpoints of generation `n` (`2^n` values); intended for small `n`.
    pub fn generation(&self, n: usize) -> Vec<f64> {
        let n = n.min(self.depth_cap).min(24);
        let mut starts = vec![TwoSum::default()];
        for g in 0..n {
            let shift = self.right_shift(g);
            starts = starts
                .into_iter()
                .flat_map(|a| [a, a.add(shift)])
                .collect();
        }
        starts.into_iter().map(|a| a.hi).collect()
    }

    /// Certified bracket for the distribution function `φ(x)` on `[0, 2π]`.
    pub fn cdf_bracket(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 0.0);
        }
        if x >= self.lengths[0] {
            return (1.0, 1.0);
        }
        let mut a = TwoSum::default();
        let mut mass = 0.0;
        let mut weight = 1.0;
        for n in 0..self.depth_cap {
            let d = a.offset_of(x);
            if d <= 0.0 {
                return (mass, mass);
            }
            if d >= self.lengths[n] {
                return (mass + weight, mass + weight);
            }
            let child = self.lengths[n + 1];
            weight *= 0.5;
            if d <= child {
                continue;
            }
            if d < self.lengths[n] - child {
                return (mass + weight, mass + weight);
            }
            mass += weight;
            a = a.add(self.right_shift(n));
        }
        (mass, mass + weight)
    }

    /// `σ` of the counter-clockwise arc from `start` with length `len ≤ 2π`.
    pub fn arc_mass_bracket(&self, start: f64, len: f64) -> (f64, f64) {
        if len >= TAU {
            return (1.0, 1.0);
        }
        let s = crate::geometry::wrap_positive(start);
        let e = s + len;
        let (s_lo, s_hi) = self.cdf_bracket(s);
        if e <= TAU {
            let (e_lo, e_hi) = self.cdf_bracket(e);
            ((e_lo - s_hi).max(0.0), (e_hi - s_lo).max(0.0))
        } else {
            let (e_lo, e_hi) = self.cdf_bracket(e - TAU);
            ((1.0 - s_hi + e_lo).max(0.0), (1.0 - s_lo + e_hi).min(1.0))
        }
    }

    /// Angular distance from the arc `[start, start + len]` to the Cantor set.
    pub fn distance_to_arc(&self, start: f64, len: f64) -> f64 {
        if len >= TAU {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        self.distance_rec(start, len, TwoSum::default(), 0, &mut best);
        best
    }

    fn distance_rec(&self, start: f64, len: f64, a: TwoSum, n: usize, best: &mut f64) {
        if *best == 0.0 {
            return;
        }
        let l = self.lengths[n];
        // Both endpoints of every generation interval belong to the set.
        let left = a.hi;
        let right = a.add(l).hi;
        let arc = ArcSpan { start, len };
        let d_ends = arc.distance(left).min(arc.distance(right));
        if d_ends < *best {
            *best = d_ends;
        }
        if d_ends == 0.0 {
            return;
        }
        // Only an arc overlapping the interior can be nearer than the endpoints.
        if !arc.overlaps(left, l) {
            return;
        }
        if n == self.depth_cap {
            *best = 0.0;
            return;
        }
        self.distance_rec(start, len, a, n + 1, best);
        self.distance_rec(start, len, a.add(self.right_shift(n)), n + 1, best);
    }
}

/// Counter-clockwise arc `[start, start + len]` used for overlap and distance tests.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArcSpan {
    pub start: f64,
    pub len: f64,
}

impl ArcSpan {
    pub fn distance(&self, theta: f64) -> f64 {
        let off = crate::geometry::wrap_positive(theta - self.start);
        if off <= self.len {
            0.0
        } else {
            (off - self.len).min(TAU - off)
        }
    }

    /// Whether the arc meets the interval `[a, a + l]`.
    pub fn overlaps(&self, a: f64, l: f64) -> bool {
        let off = crate::geometry::wrap_positive(a - self.start);
        off <= self.len || off + l >= TAU
    }
}

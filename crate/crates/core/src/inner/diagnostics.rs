use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ZeroSequence;
use crate::error::{Error, Result};
use crate::geometry::{rho, wrap_positive};

/// Empirical interpolation evidence for a zero prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Minimum pairwise pseudohyperbolic distance.
    pub delta: f64,
    /// Maximum over dyadic boxes of `Σ_{z_j ∈ Q}(1-|z_j|)/ℓ(Q)`, `ℓ` the boundary arc length.
    pub box_constant: f64,
    pub zeros_used: usize,
}

const MAX_BOX_DEPTH: u32 = 50;

/// Separation and Carleson box constants over the first `horizon` zeros.
pub fn separation_constants(zeros: &ZeroSequence, horizon: usize) -> Result<SeparationReport> {
    let pts = zeros.prefix(horizon.min(zeros.available()));
    if pts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "separation needs at least 2 zeros, got {}",
            pts.len()
        )));
    }
    let mut delta = f64::INFINITY;
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            delta = delta.min(rho(a, b));
        }
    }

    let min_gap = pts
        .iter()
        .map(|z| 1.0 - z.norm())
        .fold(f64::INFINITY, f64::min);
    let max_depth = ((PI / min_gap).log2().ceil() as u32).clamp(2, MAX_BOX_DEPTH);
    let mut box_constant: f64 = 0.0;
    for n in 2..=max_depth {
        let side = PI * (-(n as f64)).exp2();
        let width = TAU * (-(n as f64)).exp2();
        let mut boxes: HashMap<u64, f64> = HashMap::new();
        for z in &pts {
            let gap = 1.0 - z.norm();
            if gap > side {
                continue;
            }
            let k = (wrap_positive(z.im.atan2(z.re)) / width).floor() as u64;
            *boxes.entry(k).or_default() += gap;
        }
        for mass in boxes.values() {
            box_constant = box_constant.max(mass / width);
        }
    }
    Ok(SeparationReport {
        delta,
        box_constant,
        zeros_used: pts.len(),
    })
}

/// `min_{n < horizon} Σ_{|z_j| > |z_n|}(1-|z_j|)/(1-|z_n|)`, the unlisted zeros counted through
/// the tail bound.
pub fn stolz_tail_ratio(zeros: &ZeroSequence, horizon: usize) -> f64 {
    let n = horizon.min(zeros.available());
    let mut gaps: Vec<f64> = zeros.prefix(n).iter().map(|z| 1.0 - z.norm()).collect();
    if gaps.is_empty() {
        return 0.0;
    }
    // decreasing gap = increasing modulus
    gaps.sort_by(|a, b| b.total_cmp(a));
    let tail = zeros.tail_after(n);
    let mut best = f64::INFINITY;
    let mut suffix = tail;
    let mut i = gaps.len();
    while i > 0 {
        // group equal moduli: only strictly larger moduli count
        let g = gaps[i - 1];
        let mut j = i;
        while j > 0 && gaps[j - 1] == g {
            j -= 1;
        }
        best = best.min(suffix / g);
        suffix += gaps[j..i].iter().sum::<f64>();
        i = j;
    }
    best
}

/// Trapezoidal `∫_0^{2π} log⁺(Σ(1-|z_n|²)/|e^{iθ}-z_n|²) dθ` on `quadrature_n` nodes.
pub fn ahern_clark_integral(zeros: &ZeroSequence, quadrature_n: usize) -> f64 {
    let pts = zeros.prefix(zeros.available());
    if pts.is_empty() || quadrature_n == 0 {
        return 0.0;
    }
    let h = TAU / quadrature_n as f64;
    (0..quadrature_n)
        .map(|k| {
            let xi = Complex64::from_polar(1.0, k as f64 * h);
            let s: f64 = pts
                .iter()
                .map(|z| (1.0 - z.norm_sqr()) / (xi - z).norm_sqr())
                .sum();
            s.ln().max(0.0)
        })
        .sum::<f64>()
        * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn separation_examples() {
        let z = ZeroSequence::finite(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(separation_constants(&z, 10).unwrap().delta, 0.5, epsilon = 1e-15);
        assert!(separation_constants(&ZeroSequence::finite(vec![c(0.5, 0.0)]).unwrap(), 10).is_err());
    }

    #[test]
    fn radial_separation_tends_to_one_third() {
        let closed = |n: i32| {
            let a = (-n as f64).exp2();
            let b = (-(n + 1) as f64).exp2();
            (a - b) / (a + b - (-(2 * n + 1) as f64).exp2())
        };
        let mut prev = f64::INFINITY;
        for n_max in [4usize, 8, 16, 30] {
            let zs: Vec<_> = (1..=n_max).map(|n| c(1.0 - (-(n as f64)).exp2(), 0.0)).collect();
            let d = separation_constants(&ZeroSequence::finite(zs).unwrap(), n_max).unwrap().delta;
            assert!(d > 1.0 / 3.0 - 1e-12 && d <= prev + 1e-15);
            assert_abs_diff_eq!(d, closed(n_max as i32 - 1), epsilon = 1e-9);
            prev = d;
        }
        assert!(prev - 1.0 / 3.0 < 1e-8);
    }

    #[test]
    fn radial_box_constant_is_bounded() {
        let zs: Vec<_> = (1..=40).map(|n| c(1.0 - (-(n as f64)).exp2(), 0.0)).collect();
        let b = separation_constants(&ZeroSequence::finite(zs).unwrap(), 40).unwrap().box_constant;
        // Σ_{j≥n} 2^{-j} over an arc of length 2π·2^{-n}·(π/2)^{-1}-ish: O(1)
        assert!(b > 0.0 && b < 1.0);
    }

    #[test]
    fn stolz_examples() {
        let g = ZeroSequence::radial_geometric(0.0);
        for h in [1, 5, 20, 40] {
            assert_abs_diff_eq!(stolz_tail_ratio(&g, h), 1.0, epsilon = 1e-12);
        }
        let s = ZeroSequence::radial_sparse(0.0);
        let r3 = stolz_tail_ratio(&s, 3);
        let r5 = stolz_tail_ratio(&s, 5);
        let r7 = stolz_tail_ratio(&s, 7);
        assert!(r7 < r5 && r5 < r3 && r7 < 1e-4);
        let f = ZeroSequence::finite(vec![c(0.5, 0.0), c(0.9, 0.0)]).unwrap();
        assert_eq!(stolz_tail_ratio(&f, 2), 0.0);
    }

    #[test]
    fn ahern_clark_trivial_cases() {
        assert_eq!(ahern_clark_integral(&ZeroSequence::finite(vec![]).unwrap(), 1024), 0.0);
        let z = ZeroSequence::finite(vec![c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(ahern_clark_integral(&z, 1024), 0.0, epsilon = 1e-12);
    }

    /// Bisection oracle: `log⁺ P(0.9, θ)` is decreasing on `[0, π]`, so each cell is bracketed by
    /// its endpoint values.
    fn oracle_single_zero(r: f64, eta: f64) -> (f64, f64) {
        let f = |t: f64| {
            let p = (1.0 - r * r) / (1.0 - 2.0 * r * t.cos() + r * r);
            p.ln().max(0.0)
        };
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut stack = vec![(0.0, PI, f(0.0), f(PI))];
        while let Some((a, b, fa, fb)) = stack.pop() {
            if (fa - fb) * (b - a) <= eta || fa == fb {
                lo += fb * (b - a);
                hi += fa * (b - a);
            } else {
                let m = 0.5 * (a + b);
                let fm = f(m);
                stack.push((a, m, fa, fm));
                stack.push((m, b, fm, fb));
            }
        }
        (2.0 * lo, 2.0 * hi)
    }

    #[test]
    fn ahern_clark_matches_bisection_oracle() {
        let (lo, hi) = oracle_single_zero(0.9, 4e-14);
        assert!(hi - lo < 1e-6);
        let z = ZeroSequence::finite(vec![c(0.9, 0.0)]).unwrap();
        let v = ahern_clark_integral(&z, 1 << 18);
        assert!(v >= lo - 1e-6 && v <= hi + 1e-6, "{v} not in [{lo}, {hi}]");
        assert_abs_diff_eq!(v, 0.5 * (lo + hi), epsilon = 1e-6);
    }
}

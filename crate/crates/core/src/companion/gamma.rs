use std::fmt::Write as _;

use num_complex::Complex64;

use super::chain::{ChainArc, WhitneyChain};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaPiece {
    /// `{radius·e^{it} : start ≤ t ≤ end}`; `arc` indexes the chain arc it came from.
    Circular { radius: f64, start: f64, end: f64, arc: usize },
    /// Connector at a shared endpoint, traversed from `from` to `to`.
    Radial { angle: f64, from: f64, to: f64 },
}

impl GammaPiece {
    pub fn length(&self) -> f64 {
        match *self {
            GammaPiece::Circular { radius, start, end, .. } => radius * (end - start),
            GammaPiece::Radial { from, to, .. } => (to - from).abs(),
        }
    }

    /// Point at arclength `t ∈ [0, length]` from the piece start.
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            GammaPiece::Circular { radius, start, end, .. } => {
                Complex64::from_polar(radius, (start + t / radius).min(end))
            }
            GammaPiece::Radial { angle, from, to } => {
                let r = if to >= from { (from + t).min(to) } else { (from - t).max(to) };
                Complex64::from_polar(r, angle)
            }
        }
    }
}

/// One connected component of `Γ`, parametrized by arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaChain {
    pub pieces: Vec<GammaPiece>,
    pub closed: bool,
    /// `offsets[i]` is the arclength at the start of piece `i`; last entry is the total.
    offsets: Vec<f64>,
}

impl GammaChain {
    fn new(pieces: Vec<GammaPiece>, closed: bool) -> Self {
        let mut offsets = Vec::with_capacity(pieces.len() + 1);
        let mut s = 0.0;
        offsets.push(s);
        for p in &pieces {
            s += p.length();
            offsets.push(s);
        }
        GammaChain { pieces, closed, offsets }
    }

    pub fn length(&self) -> f64 {
        *self.offsets.last().unwrap_or(&0.0)
    }

    pub fn piece_offset(&self, i: usize) -> f64 {
        self.offsets[i]
    }

    /// Index of the piece holding parameter `s` (clamped, wrapped when closed).
    pub fn piece_at(&self, s: f64) -> usize {
        let s = self.normalize(s);
        let i = self.offsets.partition_point(|&o| o <= s);
        i.saturating_sub(1).min(self.pieces.len() - 1)
    }

    fn normalize(&self, s: f64) -> f64 {
        let l = self.length();
        if self.closed && l > 0.0 {
            s.rem_euclid(l)
        } else {
            s.clamp(0.0, l)
        }
    }

    pub fn point(&self, s: f64) -> Complex64 {
        let i = self.piece_at(s);
        self.pieces[i].point(self.normalize(s) - self.offsets[i])
    }
}

/// The curve `Γ`: one chain per maximal run of abutting Whitney arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaCurve {
    pub chains: Vec<GammaChain>,
}

fn pieces_for(arcs: &[ChainArc], run: &[usize]) -> Vec<GammaPiece> {
    let mut out = Vec::new();
    for (j, &i) in run.iter().enumerate() {
        let c = &arcs[i];
        if j > 0 {
            let prev = arcs[run[j - 1]].radius;
            if prev != c.radius {
                out.push(GammaPiece::Radial {
                    angle: c.arc.start(),
                    from: prev,
                    to: c.radius,
                });
            }
        }
        out.push(GammaPiece::Circular {
            radius: c.radius,
            start: c.arc.start(),
            end: c.arc.end(),
            arc: i,
        });
    }
    out
}

/// Joins `Γ_n = {r_n e^{it} : t ∈ I_n}` with radial segments where arcs share an endpoint.
pub fn build_gamma(chain: &WhitneyChain) -> GammaCurve {
    let arcs = &chain.arcs;
    if arcs.is_empty() {
        return GammaCurve { chains: Vec::new() };
    }
    let mut runs: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..arcs.len() {
        if arcs[i - 1].arc.abuts(&arcs[i].arc) {
            runs.last_mut().unwrap().push(i);
        } else {
            runs.push(vec![i]);
        }
    }
    let wraps = arcs[arcs.len() - 1].arc.abuts(&arcs[0].arc);
    let closed = wraps && runs.len() == 1;
    if wraps && runs.len() > 1 {
        let first = runs.remove(0);
        runs.last_mut().unwrap().extend(first);
    }
    let mut chains: Vec<GammaChain> = runs
        .iter()
        .map(|run| {
            let mut pieces = pieces_for(arcs, run);
            if closed {
                let (last, first) = (arcs[run[run.len() - 1]].radius, arcs[run[0]].radius);
                if last != first {
                    pieces.push(GammaPiece::Radial {
                        angle: arcs[run[0]].arc.start(),
                        from: last,
                        to: first,
                    });
                }
            }
            GammaChain::new(pieces, closed)
        })
        .collect();
    // boundary order of the leftmost endpoints
    chains.sort_by(|a, b| start_angle(a).total_cmp(&start_angle(b)));
    GammaCurve { chains }
}

fn start_angle(c: &GammaChain) -> f64 {
    match c.pieces[0] {
        GammaPiece::Circular { start, .. } => start,
        GammaPiece::Radial { angle, .. } => angle,
    }
}

impl GammaCurve {
    /// `re,im` polyline, chains separated by a blank line; `per_piece` points on circular pieces.
    pub fn to_csv(&self, per_piece: usize) -> String {
        let per_piece = per_piece.max(2);
        let mut out = String::from("re,im\n");
        for (ci, chain) in self.chains.iter().enumerate() {
            if ci > 0 {
                out.push('\n');
            }
            for p in &chain.pieces {
                let n = match p {
                    GammaPiece::Circular { .. } => per_piece,
                    GammaPiece::Radial { .. } => 2,
                };
                for k in 0..n {
                    let z = p.point(p.length() * k as f64 / (n - 1) as f64);
                    let _ = writeln!(out, "{:.16e},{:.16e}", z.re, z.im);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundarySet, WhitneyArc};
    use crate::companion::chain::grid_radius;

    fn chain_of(arcs: Vec<WhitneyArc>, k: impl Fn(usize) -> u32) -> WhitneyChain {
        WhitneyChain {
            arcs: arcs
                .into_iter()
                .enumerate()
                .map(|(i, arc)| ChainArc { arc, epsilon: 0.5, k: k(i), radius: grid_radius(k(i)) })
                .collect(),
        }
    }

    #[test]
    fn empty_set_gives_closed_circle() {
        let arcs: Vec<_> = BoundarySet::Empty.whitney_arcs(0.1).unwrap().collect();
        let g = build_gamma(&chain_of(arcs, |_| 3));
        assert_eq!(g.chains.len(), 1);
        let c = &g.chains[0];
        assert!(c.closed);
        assert!((c.length() - std::f64::consts::TAU * 0.875).abs() < 1e-12);
        assert!((c.point(0.0) - c.point(c.length())).norm() < 1e-12);
    }

    #[test]
    fn connectors_are_continuous() {
        let e = BoundarySet::Points(vec![0.0]);
        let arcs: Vec<_> = e.whitney_arcs(0.01).unwrap().collect();
        let n = arcs.len();
        let g = build_gamma(&chain_of(arcs, |i| 2 + (i.min(n - 1 - i) as u32)));
        assert_eq!(g.chains.len(), 1);
        let c = &g.chains[0];
        assert!(!c.closed);
        for i in 1..c.pieces.len() {
            let s = c.piece_offset(i);
            let a = c.pieces[i - 1].point(c.pieces[i - 1].length());
            let b = c.pieces[i].point(0.0);
            assert!((a - b).norm() < 1e-12, "gap at piece {i}");
            assert!((c.point(s) - b).norm() < 1e-12);
        }
    }

    #[test]
    fn two_points_give_two_chains() {
        let e = BoundarySet::Points(vec![0.0, std::f64::consts::PI]);
        let arcs: Vec<_> = e.whitney_arcs(0.05).unwrap().collect();
        let g = build_gamma(&chain_of(arcs, |_| 4));
        assert_eq!(g.chains.len(), 2);
        assert!(g.chains.iter().all(|c| !c.closed));
        let csv = g.to_csv(8);
        assert!(csv.starts_with("re,im\n"));
    }
}

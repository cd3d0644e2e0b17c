use num_complex::Complex64;

use super::gamma::{GammaChain, GammaCurve, GammaPiece};
use crate::error::{Error, Result};
use crate::geometry::{rho, wrap_positive};

/// Parameter step as a fraction of `1 - |γ(s)|`.
const STEP: f64 = 0.01;
const BISECT_TOL: f64 = 1e-9;
/// Closing gap allowed on a closed chain below the spacing.
const CLOSE_SLACK: f64 = 1e-6;

struct Marcher<'a> {
    chain: &'a GammaChain,
    s: f64,
    dir: f64,
    limit: f64,
    last: Complex64,
    origin: Complex64,
    done: bool,
    /// Ran off an open end with zeros still wanted.
    exhausted: bool,
}

impl<'a> Marcher<'a> {
    /// Next zero along the march and the piece holding it.
    fn next(&mut self, rho0: f64) -> Result<Option<(Complex64, usize)>> {
        if self.done {
            return Ok(None);
        }
        let dir = self.dir;
        let mut a = self.s;
        loop {
            let pa = self.chain.point(a);
            let mut b = a + dir * STEP * (1.0 - pa.norm());
            let beyond = (b - self.limit) * dir >= 0.0;
            if beyond {
                b = self.limit;
            }
            if b == a && !beyond {
                return Err(Error::PrecisionExhausted { lo: a, hi: b });
            }
            let pb = self.chain.point(b);
            if rho(self.last, pb) >= rho0 {
                let s = self.bisect(a, b, rho0);
                let z = self.chain.point(s);
                if self.chain.closed && rho(z, self.origin) < rho0 - CLOSE_SLACK {
                    self.done = true;
                    return Ok(None);
                }
                self.s = s;
                self.last = z;
                return Ok(Some((z, self.chain.piece_at(s))));
            }
            if beyond {
                self.done = true;
                self.exhausted = !self.chain.closed;
                return Ok(None);
            }
            a = b;
        }
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, rho0: f64) -> f64 {
        let mut mid = 0.5 * (lo + hi);
        for _ in 0..200 {
            mid = 0.5 * (lo + hi);
            let r = rho(self.last, self.chain.point(mid));
            if (r - rho0).abs() < BISECT_TOL || mid == lo || mid == hi {
                break;
            }
            if r < rho0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mid
    }
}

/// Result of marching zeros along `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// Retained zeros in the order they were taken (non-decreasing modulus per source).
    pub zeros: Vec<Complex64>,
    /// Indices of consecutive zeros along `Γ`.
    pub pairs: Vec<(usize, usize)>,
    /// An open end of `Γ` was consumed before `horizon` zeros were taken.
    pub exhausted: bool,
    /// `(chain, piece)` for every piece whose zeros were all retained.
    pub complete_pieces: Vec<(usize, usize)>,
    /// Ends of `Γ` at the Whitney cutoff.
    pub open_ends: usize,
}

/// Start parameter: the lowest circular piece, ties to the smallest start angle.
fn start_parameter(chain: &GammaChain) -> (usize, f64) {
    let mut best: Option<(f64, f64, usize)> = None;
    for (i, p) in chain.pieces.iter().enumerate() {
        if let GammaPiece::Circular { radius, start, .. } = *p {
            let key = (radius, wrap_positive(start), i);
            if best.map_or(true, |b| (key.0, key.1) < (b.0, b.1)) {
                best = Some(key);
            }
        }
    }
    let i = best.map_or(0, |b| b.2);
    (i, chain.piece_offset(i))
}

enum Source<'a> {
    Start { chain: usize, z: Option<(Complex64, usize)> },
    Dir { chain: usize, m: Marcher<'a> },
}

/// Places zeros at consecutive pseudohyperbolic distance `rho0` along every chain of `Γ`,
/// then keeps the `horizon` of smallest modulus as contiguous runs from each chain's start.
pub fn place_zeros(gamma: &GammaCurve, rho0: f64, horizon: usize) -> Result<Placement> {
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(Error::InvalidInput(format!("spacing {rho0} outside (0, 1)")));
    }
    let mut sources = Vec::new();
    let mut starts = Vec::new();
    for (ci, chain) in gamma.chains.iter().enumerate() {
        if chain.pieces.is_empty() {
            continue;
        }
        let (piece, s0) = start_parameter(chain);
        let z0 = chain.point(s0);
        starts.push((ci, piece));
        sources.push(Source::Start { chain: ci, z: Some((z0, piece)) });
        let dirs: &[(f64, f64)] = if chain.closed {
            &[(1.0, s0 + chain.length())]
        } else {
            &[(1.0, chain.length()), (-1.0, 0.0)]
        };
        for &(dir, limit) in dirs {
            sources.push(Source::Dir {
                chain: ci,
                m: Marcher {
                    chain,
                    s: s0,
                    dir,
                    limit,
                    last: z0,
                    origin: z0,
                    done: false,
                    exhausted: false,
                },
            });
        }
    }

    let mut peeks: Vec<Option<(Complex64, usize)>> = Vec::with_capacity(sources.len());
    for src in sources.iter_mut() {
        peeks.push(match src {
            Source::Start { z, .. } => *z,
            Source::Dir { m, .. } => m.next(rho0)?,
        });
    }
    let mut start_index: Vec<Option<usize>> = vec![None; gamma.chains.len()];
    let mut last_taken: Vec<Option<usize>> = vec![None; sources.len()];
    let mut zeros = Vec::new();
    let mut zero_piece = Vec::new();
    let mut pairs = Vec::new();
    let mut exhausted = false;
    while zeros.len() < horizon {
        let Some((k, (z, piece))) = peeks
            .iter()
            .enumerate()
            .filter(|(k, _)| match &sources[*k] {
                // a march waits for its chain's start; rounding can put its first zero lower
                Source::Dir { chain, .. } => start_index[*chain].is_some(),
                Source::Start { .. } => true,
            })
            .filter_map(|(k, p)| p.map(|z| (k, z)))
            .min_by(|a, b| a.1 .0.norm().total_cmp(&b.1 .0.norm()).then(a.0.cmp(&b.0)))
        else {
            break;
        };
        let idx = zeros.len();
        zeros.push(z);
        zero_piece.push(piece);
        match &mut sources[k] {
            Source::Start { chain, z } => {
                start_index[*chain] = Some(idx);
                *z = None;
                peeks[k] = None;
            }
            Source::Dir { chain, m } => {
                let prev = last_taken[k].or(start_index[*chain]).ok_or_else(|| {
                    Error::InvalidInput("chain start not retained before its march".into())
                })?;
                pairs.push((prev, idx));
                peeks[k] = m.next(rho0)?;
                if m.exhausted && zeros.len() < horizon {
                    exhausted = true;
                }
            }
        }
        last_taken[k] = Some(idx);
    }

    let mut complete_pieces = Vec::new();
    let mut open_ends = 0;
    for &(ci, p0) in &starts {
        let chain = &gamma.chains[ci];
        let n = chain.pieces.len();
        let dirs: Vec<(f64, bool, Option<usize>)> = sources
            .iter()
            .zip(last_taken.iter().zip(&peeks))
            .filter_map(|(s, (t, peek))| match s {
                Source::Dir { chain, m } if *chain == ci => {
                    let reached = t.map(|i| zero_piece[i]);
                    Some((m.dir, m.done && peek.is_none(), reached))
                }
                _ => None,
            })
            .collect();
        if !chain.closed {
            open_ends += 2;
        }
        for i in 0..n {
            let ok = if chain.closed {
                let (_, done, reached) = dirs[0];
                let rel = |j: usize| (j + n - p0) % n;
                done || reached.is_some_and(|r| rel(i) > 0 && rel(r) > rel(i))
            } else {
                dirs.iter().all(|&(dir, done, reached)| {
                    let ahead = if dir > 0.0 { i >= p0 } else { i <= p0 };
                    !ahead
                        || done
                        || reached.is_some_and(|r| if dir > 0.0 { r > i } else { r < i })
                })
            };
            if ok {
                complete_pieces.push((ci, i));
            }
        }
    }
    Ok(Placement {
        zeros,
        pairs,
        exhausted,
        complete_pieces,
        open_ends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundarySet;
    use crate::companion::chain::{grid_radius, ChainArc, WhitneyChain};
    use crate::companion::gamma::build_gamma;

    fn gamma(e: &BoundarySet, min_len: f64, k: impl Fn(f64) -> u32) -> GammaCurve {
        let arcs = e
            .whitney_arcs(min_len)
            .unwrap()
            .map(|arc| {
                let kk = k(arc.length());
                ChainArc { arc, epsilon: 0.5, k: kk, radius: grid_radius(kk) }
            })
            .collect();
        build_gamma(&WhitneyChain { arcs })
    }

    #[test]
    fn closed_circle_spacing() {
        let g = gamma(&BoundarySet::Empty, 0.1, |_| 4);
        let p = place_zeros(&g, 0.1, 10_000).unwrap();
        assert!(!p.exhausted);
        assert_eq!(p.complete_pieces.len(), g.chains[0].pieces.len());
        // ring of radius r at spacing ρ: about 2π r / (ρ(1 - r²)) points
        let r = grid_radius(4);
        let expect = std::f64::consts::TAU * r / (0.1 * (1.0 - r * r));
        assert!((p.zeros.len() as f64 - expect).abs() < 0.02 * expect, "{}", p.zeros.len());
        for &(i, j) in &p.pairs {
            assert!((rho(p.zeros[i], p.zeros[j]) - 0.1).abs() < 1e-6);
        }
        for i in 0..p.zeros.len() {
            for j in 0..i {
                assert!(rho(p.zeros[i], p.zeros[j]) > 0.1 - 1e-6);
            }
        }
    }

    #[test]
    fn open_chain_exhausts_and_truncates() {
        let e = BoundarySet::Points(vec![0.0]);
        let g = gamma(&e, 0.05, |l| (2.0 * (std::f64::consts::TAU / l).log2()) as u32);
        let all = place_zeros(&g, 0.1, usize::MAX).unwrap();
        assert!(all.exhausted);
        assert_eq!(all.open_ends, 2);
        let some = place_zeros(&g, 0.1, 50).unwrap();
        assert_eq!(some.zeros.len(), 50);
        assert!(!some.exhausted);
        // truncation keeps a prefix of every march
        for z in &some.zeros {
            assert!(all.zeros.iter().any(|w| (w - z).norm() < 1e-12));
        }
        let max_kept = some.zeros.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_kept < 1.0);
    }
}

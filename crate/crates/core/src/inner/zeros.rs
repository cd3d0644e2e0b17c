use std::fmt;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

type ZeroFn = dyn Fn(usize) -> Complex64 + Send + Sync;
type TailFn = dyn Fn(usize) -> f64 + Send + Sync;

/// An infinite zero family: `zero(j)` for `j = 0, 1, ...` and a bound
/// `tail(n) ≥ Σ_{j ≥ n} (1 - |z_j|)`.
pub struct ZeroGenerator {
    label: String,
    zero: Box<ZeroFn>,
    tail: Box<TailFn>,
    /// Number of zeros representable in double precision; later ones are covered by `tail`.
    representable: usize,
    accumulation: Vec<f64>,
    cache: RwLock<Vec<Complex64>>,
}

impl fmt::Debug for ZeroGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ZeroGenerator")
            .field("label", &self.label)
            .field("representable", &self.representable)
            .field("accumulation", &self.accumulation)
            .finish()
    }
}

const PROBE_WINDOW: usize = 4096;

impl ZeroGenerator {
    pub fn new(
        label: impl Into<String>,
        zero: impl Fn(usize) -> Complex64 + Send + Sync + 'static,
        tail: impl Fn(usize) -> f64 + Send + Sync + 'static,
        representable: usize,
        accumulation: Vec<f64>,
    ) -> Result<Self> {
        let g = ZeroGenerator {
            label: label.into(),
            zero: Box::new(zero),
            tail: Box::new(tail),
            representable,
            accumulation,
            cache: RwLock::new(Vec::new()),
        };
        g.check_blaschke()?;
        Ok(g)
    }

    /// Reject families whose declared tail bound is contradicted by the listed zeros.
    fn check_blaschke(&self) -> Result<()> {
        for start in [0usize, 16, 256, 4096] {
            if start >= self.representable {
                break;
            }
            let end = (start + PROBE_WINDOW).min(self.representable);
            let mut partial = 0.0;
            for j in start..end {
                let z = (self.zero)(j);
                let m = z.norm();
                if !(m < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "generator '{}' zero {j} has modulus {m} ≥ 1",
                        self.label
                    )));
                }
                partial += 1.0 - m;
            }
            let bound = (self.tail)(start);
            if !(bound.is_finite()) || partial > bound * (1.0 + 1e-9) + 1e-300 {
                return Err(Error::InvalidInput(format!(
                    "generator '{}' violates its Blaschke tail bound at {start}: {partial:e} > {bound:e}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn representable(&self) -> usize {
        self.representable
    }

    pub fn accumulation(&self) -> &[f64] {
        &self.accumulation
    }

    pub fn tail(&self, n: usize) -> f64 {
        (self.tail)(n)
    }

    /// Zero `j`, bypassing the cache.
    pub fn zero(&self, j: usize) -> Complex64 {
        (self.zero)(j)
    }

    fn prefix(&self, n: usize) -> Vec<Complex64> {
        let n = n.min(self.representable);
        {
            let cache = self.cache.read().expect("zero cache poisoned");
            if cache.len() >= n {
                return cache[..n].to_vec();
            }
        }
        let mut cache = self.cache.write().expect("zero cache poisoned");
        while cache.len() < n {
            let j = cache.len();
            cache.push((self.zero)(j));
        }
        cache[..n].to_vec()
    }
}

/// Zeros of a Blaschke product, repeated by multiplicity.
#[derive(Debug, Clone)]
pub enum ZeroSequence {
    /// Listed zeros plus a bound on `Σ(1-|z|)` over unlisted ones.
    Listed { zeros: Vec<Complex64>, tail: f64 },
    Generated(Arc<ZeroGenerator>),
}

impl ZeroSequence {
    pub fn finite(zeros: Vec<Complex64>) -> Result<Self> {
        Self::with_tail(zeros, 0.0)
    }

    pub fn with_tail(zeros: Vec<Complex64>, tail: f64) -> Result<Self> {
        if !(tail >= 0.0 && tail.is_finite()) {
            return Err(Error::InvalidInput(format!("tail Blaschke sum {tail} must be ≥ 0")));
        }
        if let Some((i, z)) = zeros
            .iter()
            .enumerate()
            .find(|(_, z)| !(z.norm() < 1.0) || !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput(format!("zero {i} = {z} not in the open disc")));
        }
        Ok(ZeroSequence::Listed { zeros, tail })
    }

    pub fn generated(generator: ZeroGenerator) -> Self {
        ZeroSequence::Generated(Arc::new(generator))
    }

    /// `z_n = e^{iθ}(1 - 2^{-n})`, `n ≥ 1`.
    pub fn radial_geometric(theta: f64) -> Self {
        let unit = Complex64::from_polar(1.0, theta);
        let g = ZeroGenerator::new(
            "radial 1-2^-n",
            move |j| unit * (1.0 - (-((j + 1) as f64)).exp2()),
            |n| (-(n as f64)).exp2(),
            52,
            vec![theta],
        )
        .expect("geometric radial family satisfies its tail bound");
        ZeroSequence::generated(g)
    }

    /// `z_n = e^{iθ}(1 - 2^{-n²})`, `n ≥ 1`.
    pub fn radial_sparse(theta: f64) -> Self {
        let unit = Complex64::from_polar(1.0, theta);
        let g = ZeroGenerator::new(
            "radial 1-2^-n^2",
            move |j| {
                let m = (j + 1) as f64;
                unit * (1.0 - (-(m * m)).exp2())
            },
            // Σ_{m > n} 2^{-m²} ≤ 2·2^{-(n+1)²}
            |n| {
                let m = (n + 1) as f64;
                2.0 * (-(m * m)).exp2()
            },
            7,
            vec![theta],
        )
        .expect("sparse radial family satisfies its tail bound");
        ZeroSequence::generated(g)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ZeroSequence::Generated(_))
    }

    /// Number of zeros that can be materialized.
    pub fn available(&self) -> usize {
        match self {
            ZeroSequence::Listed { zeros, .. } => zeros.len(),
            ZeroSequence::Generated(g) => g.representable(),
        }
    }

    /// First `n` zeros (fewer if not available).
    pub fn prefix(&self, n: usize) -> Vec<Complex64> {
        match self {
            ZeroSequence::Listed { zeros, .. } => zeros[..n.min(zeros.len())].to_vec(),
            ZeroSequence::Generated(g) => g.prefix(n),
        }
    }

    /// Bound on `Σ_{j ≥ n} (1 - |z_j|)`.
    pub fn tail_after(&self, n: usize) -> f64 {
        match self {
            ZeroSequence::Listed { zeros, tail } => {
                zeros.iter().skip(n).map(|z| 1.0 - z.norm()).sum::<f64>() + tail
            }
            ZeroSequence::Generated(g) => g.tail(n.min(g.representable())),
        }
    }

    /// Accumulation points declared for the family.
    pub fn accumulation(&self) -> Vec<f64> {
        match self {
            ZeroSequence::Listed { .. } => Vec::new(),
            ZeroSequence::Generated(g) => g.accumulation().to_vec(),
        }
    }

    /// `extra` followed by this family.
    pub fn prepend(&self, extra: &[Complex64]) -> Result<Self> {
        match self {
            ZeroSequence::Listed { zeros, tail } => {
                let mut all = extra.to_vec();
                all.extend_from_slice(zeros);
                Self::with_tail(all, *tail)
            }
            ZeroSequence::Generated(g) => {
                Self::finite(extra.to_vec())?;
                let m = extra.len();
                let head: Arc<Vec<Complex64>> = Arc::new(extra.to_vec());
                // suffix[n] = Σ_{j ≥ n} (1 - |extra_j|)
                let mut suffix = vec![0.0; m + 1];
                for j in (0..m).rev() {
                    suffix[j] = suffix[j + 1] + (1.0 - head[j].norm());
                }
                let gen = ZeroGenerator::new(
                    format!("{} with {m} extra zeros", g.label()),
                    {
                        let (g, head) = (g.clone(), head.clone());
                        move |j| if j < m { head[j] } else { g.zero(j - m) }
                    },
                    {
                        let g = g.clone();
                        move |n| {
                            if n <= m {
                                suffix[n] + g.tail(0)
                            } else {
                                g.tail(n - m)
                            }
                        }
                    },
                    m + g.representable(),
                    g.accumulation().to_vec(),
                )?;
                Ok(ZeroSequence::generated(gen))
            }
        }
    }

    /// The same family with every zero rotated by `alpha`.
    pub fn rotated(&self, alpha: f64) -> Result<Self> {
        let rot = Complex64::from_polar(1.0, alpha);
        match self {
            ZeroSequence::Listed { zeros, tail } => {
                Self::with_tail(zeros.iter().map(|z| z * rot).collect(), *tail)
            }
            ZeroSequence::Generated(g) => {
                let gen = ZeroGenerator::new(
                    format!("{} rotated", g.label()),
                    {
                        let g = g.clone();
                        move |j| g.zero(j) * rot
                    },
                    {
                        let g = g.clone();
                        move |n| g.tail(n)
                    },
                    g.representable(),
                    g.accumulation().iter().map(|t| t + alpha).collect(),
                )?;
                Ok(ZeroSequence::generated(gen))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inconsistent_tail() {
        let bad = ZeroGenerator::new("bad", |j| Complex64::new(1.0 - 1.0 / (j + 2) as f64, 0.0), |_| 0.0, 1000, vec![]);
        assert!(bad.is_err());
        assert!(ZeroSequence::finite(vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn geometric_tail_is_exact() {
        let z = ZeroSequence::radial_geometric(0.0);
        let p = z.prefix(10);
        let listed: f64 = p[3..].iter().map(|w| 1.0 - w.norm()).sum();
        assert!((listed + z.tail_after(10) - z.tail_after(3)).abs() < 1e-15);
        assert_eq!(z.prefix(100).len(), 52);
        assert!(ZeroSequence::radial_sparse(0.0).prefix(100).iter().all(|w| w.norm() < 1.0));
    }
}

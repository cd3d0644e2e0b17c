//! Inner functions `Θ = λ·B·S`: evaluation with certified tails, the measure `μ(Θ)`,
//! and zero-sequence diagnostics.

mod diagnostics;
mod mu;
mod zeros;

use num_complex::Complex64;

pub use diagnostics::{ahern_clark_integral, separation_constants, stolz_tail_ratio, SeparationReport};
pub use mu::MuMeasure;
pub use zeros::{ZeroGenerator, ZeroSequence};

use crate::boundary::BoundarySet;
use crate::bounds::Enclosure;
use crate::error::{Error, Result};
use crate::geometry::{one_minus_rho_sq, rho};
use crate::measures::SingularMeasure;

/// Largest prefix consumed while driving a generator's tail below the budget.
pub const MAX_CONSUMED_ZEROS: usize = 1 << 22;

/// `log ρ(z, w)` computed in the form least affected by cancellation.
pub fn log_rho(z: Complex64, w: Complex64) -> f64 {
    let x = one_minus_rho_sq(z, w);
    if x < 0.5 {
        0.5 * (-x).ln_1p()
    } else {
        rho(z, w).ln()
    }
}

/// Factor `|w|/w · (w - z)/(1 - w̄z)`; the factor for `w = 0` is `z`.
pub fn blaschke_factor(w: Complex64, z: Complex64) -> Complex64 {
    let m = w.norm();
    if m == 0.0 {
        return z;
    }
    (w.conj() / m) * (w - z) / (Complex64::new(1.0, 0.0) - w.conj() * z)
}

#[derive(Debug, Clone)]
pub struct BlaschkeProduct {
    pub zeros: ZeroSequence,
}

/// Certified Blaschke log-modulus together with the prefix length used.
#[derive(Debug, Clone, Copy)]
pub struct BlaschkeLog {
    pub log: Enclosure,
    pub terms: usize,
}

impl BlaschkeProduct {
    pub fn new(zeros: ZeroSequence) -> Self {
        BlaschkeProduct { zeros }
    }

    /// Certified enclosure of `log|B(z)|` with tail error at most `budget`.
    ///
    /// Unused zeros contribute `-log ρ ≤ x/(2(1-x))` with `x = 1-ρ² ≤ 4(1-|z_n|)(1+|z|)/(1-|z|)`,
    /// summed through the tail bound.
    pub fn log_modulus(&self, z: Complex64, budget: f64) -> Result<BlaschkeLog> {
        self.log_modulus_until(z, |_, tail| tail <= budget)
            .map_err(|bound| Error::TailInsufficient { bound, budget })
    }

    /// Consume zeros until `accept(prefix_sum, tail)`; on failure returns the last tail bound.
    fn log_modulus_until(
        &self,
        z: Complex64,
        accept: impl Fn(f64, f64) -> bool,
    ) -> std::result::Result<BlaschkeLog, f64> {
        let r = z.norm();
        let available = self.zeros.available();
        let mut n = if self.zeros.is_infinite() {
            64.min(available)
        } else {
            available
        };
        loop {
            let t = 4.0 * self.zeros.tail_after(n) * (1.0 + r) / (1.0 - r);
            let tail = if t < 1.0 { 0.5 * t / (1.0 - t) } else { f64::INFINITY };
            let partial = self.sum_prefix(z, n, tail);
            if partial.log.hi == f64::NEG_INFINITY || accept(partial.log.hi, tail) {
                return Ok(partial);
            }
            if n >= available || n >= MAX_CONSUMED_ZEROS {
                return Err(tail);
            }
            n = (2 * n).max(1).min(available).min(MAX_CONSUMED_ZEROS);
        }
    }

    /// Like [`Self::log_modulus`] but only until `|B(z)|` itself is pinned within `tol`.
    pub fn log_modulus_for_modulus(&self, z: Complex64, tol: f64) -> Result<BlaschkeLog> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        self.log_modulus_until(z, |s, tail| s.exp() * -(-tail).exp_m1() <= tol)
            .map_err(|bound| Error::TailInsufficient { bound, budget: tol })
    }

    /// Certified enclosure of `log|B(z)|` from exactly the first `n` zeros and the tail bound.
    pub fn log_modulus_prefix(&self, z: Complex64, n: usize) -> Result<BlaschkeLog> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        let n = n.min(self.zeros.available());
        let t = 4.0 * self.zeros.tail_after(n) * (1.0 + r) / (1.0 - r);
        let tail = if t < 1.0 { 0.5 * t / (1.0 - t) } else { f64::INFINITY };
        Ok(self.sum_prefix(z, n, tail))
    }

    fn sum_prefix(&self, z: Complex64, n: usize, tail: f64) -> BlaschkeLog {
        let mut s = 0.0;
        for w in self.zeros.prefix(n) {
            if w == z {
                return BlaschkeLog {
                    log: Enclosure::exact(f64::NEG_INFINITY),
                    terms: n,
                };
            }
            s += log_rho(z, w);
        }
        BlaschkeLog {
            log: Enclosure::new(s - tail, s - 0.5 * tail, s),
            terms: n,
        }
    }

    /// Unit phase of the first `n` factors.
    pub fn phase(&self, z: Complex64, n: usize) -> Complex64 {
        self.zeros
            .prefix(n)
            .into_iter()
            .fold(Complex64::new(1.0, 0.0), |acc, w| {
                let f = blaschke_factor(w, z);
                let m = f.norm();
                if m == 0.0 {
                    acc
                } else {
                    acc * (f / m)
                }
            })
    }
}

#[derive(Debug, Clone)]
pub struct SingularInner {
    pub sigma: SingularMeasure,
}

/// `Θ = λ·B·S`.
#[derive(Debug, Clone)]
pub struct InnerFunction {
    pub lambda: Complex64,
    pub blaschke: Option<BlaschkeProduct>,
    pub singular: Option<SingularInner>,
}

impl InnerFunction {
    pub fn new(
        lambda: Complex64,
        zeros: Option<ZeroSequence>,
        sigma: Option<SingularMeasure>,
    ) -> Result<Self> {
        if !((lambda.norm() - 1.0).abs() < 1e-12) {
            return Err(Error::InvalidInput(format!("|λ| = {} must be 1", lambda.norm())));
        }
        Ok(InnerFunction {
            lambda,
            blaschke: zeros.map(BlaschkeProduct::new),
            singular: sigma.map(|sigma| SingularInner { sigma }),
        })
    }

    pub fn constant(lambda: Complex64) -> Result<Self> {
        Self::new(lambda, None, None)
    }

    pub fn blaschke(zeros: ZeroSequence) -> Self {
        Self::new(Complex64::new(1.0, 0.0), Some(zeros), None).expect("λ = 1")
    }

    pub fn finite_blaschke(zeros: Vec<Complex64>) -> Result<Self> {
        Ok(Self::blaschke(ZeroSequence::finite(zeros)?))
    }

    pub fn singular(sigma: SingularMeasure) -> Self {
        Self::new(Complex64::new(1.0, 0.0), None, Some(sigma)).expect("λ = 1")
    }

    pub fn zeros(&self) -> Option<&ZeroSequence> {
        self.blaschke.as_ref().map(|b| &b.zeros)
    }

    pub fn sigma(&self) -> Option<&SingularMeasure> {
        self.singular.as_ref().map(|s| &s.sigma)
    }

    pub fn is_constant(&self) -> bool {
        self.blaschke.as_ref().map_or(true, |b| b.zeros.available() == 0 && b.zeros.tail_after(0) == 0.0)
            && self.singular.is_none()
    }

    /// `Θ` multiplied by the finite Blaschke product with zeros `extra`.
    pub fn times_finite_blaschke(&self, extra: &[Complex64]) -> Result<Self> {
        let zeros = match self.zeros() {
            None => ZeroSequence::finite(extra.to_vec())?,
            Some(z) => z.prepend(extra)?,
        };
        Ok(InnerFunction {
            lambda: self.lambda,
            blaschke: Some(BlaschkeProduct::new(zeros)),
            singular: self.singular.clone(),
        })
    }

    /// Certified enclosure of `log|Θ(z)|`; `-∞` exactly at a listed zero.
    pub fn log_modulus(&self, z: Complex64, tol: f64) -> Result<Enclosure> {
        Ok(self.log_modulus_detail(z, tol)?.0)
    }

    fn log_modulus_detail(&self, z: Complex64, tol: f64) -> Result<(Enclosure, usize)> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        let mut total = Enclosure::exact(0.0);
        let mut terms = 0;
        if let Some(b) = &self.blaschke {
            let bl = b.log_modulus(z, 0.5 * tol)?;
            if bl.log.hi == f64::NEG_INFINITY {
                return Ok((bl.log, bl.terms));
            }
            total = total.add(bl.log);
            terms = bl.terms;
        }
        if let Some(s) = &self.singular {
            total = total.add(s.sigma.poisson_integral(z, 0.5 * tol)?.neg());
        }
        Ok((total, terms))
    }

    /// Certified bounds on `|Θ(z)|` of width about `tol`; cheaper than `log_modulus` where `|Θ|`
    /// is small.
    pub fn modulus_bounds(&self, z: Complex64, tol: f64) -> Result<Enclosure> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        let mut b = Enclosure::exact(1.0);
        if let Some(bp) = &self.blaschke {
            let l = bp.log_modulus_for_modulus(z, 0.5 * tol)?.log;
            if l.hi == f64::NEG_INFINITY {
                return Ok(Enclosure::exact(0.0));
            }
            b = Enclosure::new(l.lo.exp(), l.estimate.exp(), l.hi.exp().min(1.0));
        }
        if let Some(s) = &self.singular {
            let p = s.sigma.poisson_for_modulus(z, 0.5 * tol)?;
            let lo = (-p.hi).exp();
            let hi = (-p.lo).exp().min(1.0);
            b = Enclosure::new(b.lo * lo, b.estimate * (-p.estimate).exp(), b.hi * hi);
        }
        Ok(b)
    }

    /// `Θ(z)`: modulus from the certified log-modulus, phase from the truncated product
    /// and the Herglotz integral.
    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let (log, terms) = self.log_modulus_detail(z, tol)?;
        if log.hi == f64::NEG_INFINITY {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let mut phase = self.lambda;
        if let Some(b) = &self.blaschke {
            phase *= b.phase(z, terms);
        }
        if let Some(s) = &self.singular {
            let im = s.sigma.herglotz_imag(z, tol)?;
            phase *= Complex64::from_polar(1.0, im.estimate);
        }
        Ok(phase * log.estimate.exp())
    }

    /// `sing Θ`: accumulation points of zeros together with the closed support of `σ`.
    pub fn singular_set(&self) -> BoundarySet {
        let mut parts = Vec::new();
        if let Some(z) = self.zeros() {
            let acc = z.accumulation();
            if !acc.is_empty() {
                parts.push(BoundarySet::Points(acc));
            }
        }
        if let Some(s) = self.sigma() {
            parts.push(s.support());
        }
        match parts.len() {
            0 => BoundarySet::Empty,
            1 => parts.pop().expect("one part"),
            _ => BoundarySet::Union(parts),
        }
    }

    /// `μ(Θ)` with zeros materialized up to `count` (all listed zeros for finite sequences).
    pub fn mu(&self, count: usize) -> MuMeasure {
        MuMeasure::new(self, count)
    }

    /// `Θ(e^{-iα}z)`, i.e. zeros and measure rotated by `α`.
    pub fn rotated(&self, alpha: f64) -> Result<Self> {
        let zeros = self.zeros().map(|z| z.rotated(alpha)).transpose()?;
        let sigma = match self.sigma() {
            None => None,
            Some(SingularMeasure::Atomic(a)) => Some(SingularMeasure::Atomic(a.rotated(alpha))),
            Some(_) => {
                return Err(Error::InvalidInput(
                    "only atomic measures support rotation".into(),
                ))
            }
        };
        Self::new(self.lambda, zeros, sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::AtomicMeasure;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_modulus_examples() {
        let b = InnerFunction::finite_blaschke(vec![c(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(b.log_modulus(c(0.0, 0.0), 1e-12).unwrap().estimate, 0.5f64.ln(), epsilon = 1e-15);
        let zs = vec![c(0.3, 0.2), c(-0.5, 0.1), c(0.0, -0.7)];
        let b = InnerFunction::finite_blaschke(zs.clone()).unwrap();
        let expect: f64 = zs.iter().map(|z| z.norm().ln()).sum();
        assert_abs_diff_eq!(b.log_modulus(c(0.0, 0.0), 1e-12).unwrap().estimate, expect, epsilon = 1e-14);
        let s = InnerFunction::singular(AtomicMeasure::unit_atom(0.0).into());
        assert_abs_diff_eq!(s.log_modulus(c(0.5, 0.0), 1e-12).unwrap().estimate, -3.0, epsilon = 1e-14);
    }

    #[test]
    fn evaluate_examples() {
        let id = InnerFunction::finite_blaschke(vec![c(0.0, 0.0)]).unwrap();
        let v = id.evaluate(c(0.0, 0.3), 1e-12).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.3, epsilon = 1e-15);
        let b = InnerFunction::finite_blaschke(vec![c(0.4, 0.1), c(-0.2, 0.6)]).unwrap();
        assert_eq!(b.evaluate(c(0.4, 0.1), 1e-12).unwrap(), c(0.0, 0.0));
        assert!(b.log_modulus(c(0.4, 0.1), 1e-12).unwrap().hi == f64::NEG_INFINITY);
        let s = InnerFunction::singular(AtomicMeasure::unit_atom(0.0).into());
        let v = s.evaluate(c(0.5, 0.0), 1e-12).unwrap();
        assert_abs_diff_eq!(v.re, (-3.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn factor_convention_at_origin() {
        let z = c(0.2, -0.4);
        assert_eq!(blaschke_factor(c(0.0, 0.0), z), z);
    }

    #[test]
    fn generated_tail_is_consumed() {
        let b = InnerFunction::blaschke(ZeroSequence::radial_geometric(0.0));
        let z = c(0.0, 0.9);
        let e = b.log_modulus(z, 1e-9).unwrap();
        assert!(e.width() <= 0.5e-9);
        let sparse = InnerFunction::blaschke(ZeroSequence::radial_sparse(0.0));
        assert!(sparse.log_modulus(c(1.0 - 1e-6, 0.0), 1e-9).is_ok());
    }

    #[test]
    fn tail_insufficient_is_reported() {
        let b = InnerFunction::blaschke(ZeroSequence::with_tail(vec![c(0.5, 0.0)], 1e-3).unwrap());
        assert!(matches!(
            b.log_modulus(c(0.999, 0.0), 1e-6),
            Err(Error::TailInsufficient { .. })
        ));
    }

    #[test]
    fn singular_set_union() {
        let th = InnerFunction::new(
            c(1.0, 0.0),
            Some(ZeroSequence::radial_geometric(1.0)),
            Some(AtomicMeasure::unit_atom(2.0).into()),
        )
        .unwrap();
        let e = th.singular_set();
        assert!(e.distance_to_point(1.0) < 1e-15 && e.distance_to_point(2.0) < 1e-15);
        assert!(InnerFunction::finite_blaschke(vec![c(0.1, 0.0)]).unwrap().singular_set().is_empty());
    }
}

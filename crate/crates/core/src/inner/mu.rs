use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::InnerFunction;
use crate::error::{Error, Result};
use crate::geometry::{wrap_positive, CarlesonSquare};
use crate::measures::SingularMeasure;

/// `μ(Θ) = Σ(1-|z_n|)δ_{z_n} + σ` over the materialized zeros.
#[derive(Debug, Clone)]
pub struct MuMeasure {
    /// `(angle in [0, 2π), zero, 1-|z|)` sorted by angle.
    zero_atoms: Vec<(f64, Complex64, f64)>,
    boundary: Option<SingularMeasure>,
    /// Upper bound for `1-|z|` of every unlisted zero; squares with side at or below it are refused.
    horizon: f64,
}

impl MuMeasure {
    /// Materializes `count` zeros of an infinite family (all zeros of a listed one).
    pub fn new(theta: &InnerFunction, count: usize) -> Self {
        let (zeros, horizon) = match theta.zeros() {
            None => (Vec::new(), 0.0),
            Some(z) => {
                let n = if z.is_infinite() {
                    count.min(z.available())
                } else {
                    z.available()
                };
                (z.prefix(n), z.tail_after(n))
            }
        };
        let mut zero_atoms: Vec<_> = zeros
            .into_iter()
            .map(|w| {
                let a = if w.norm() == 0.0 {
                    0.0
                } else {
                    wrap_positive(w.im.atan2(w.re))
                };
                (a, w, 1.0 - w.norm())
            })
            .collect();
        zero_atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        MuMeasure {
            zero_atoms,
            boundary: theta.sigma().cloned(),
            horizon,
        }
    }

    /// Materializes enough zeros that every square of side above `min_side` can be queried.
    pub fn for_min_side(theta: &InnerFunction, min_side: f64) -> Result<Self> {
        let Some(z) = theta.zeros() else {
            return Ok(Self::new(theta, 0));
        };
        let available = z.available();
        let mut n = if z.is_infinite() { 64.min(available) } else { available };
        loop {
            let tail = z.tail_after(n);
            if tail == 0.0 || tail < min_side {
                return Ok(Self::new(theta, n));
            }
            if n >= available || n >= super::MAX_CONSUMED_ZEROS {
                return Err(Error::HorizonExceeded {
                    side: min_side,
                    horizon: tail,
                });
            }
            n = (2 * n).max(1).min(available).min(super::MAX_CONSUMED_ZEROS);
        }
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn zero_count(&self) -> usize {
        self.zero_atoms.len()
    }

    pub fn boundary_part(&self) -> Option<&SingularMeasure> {
        self.boundary.as_ref()
    }

    fn check_side(&self, q: &CarlesonSquare) -> Result<()> {
        if self.horizon > 0.0 && q.side() <= self.horizon {
            return Err(Error::HorizonExceeded {
                side: q.side(),
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    fn lower(&self, x: f64) -> usize {
        self.zero_atoms.partition_point(|a| a.0 < x)
    }

    fn upper(&self, x: f64) -> usize {
        self.zero_atoms.partition_point(|a| a.0 <= x)
    }

    /// Listed zeros inside `q`.
    fn zeros_in<'a>(
        &'a self,
        q: &'a CarlesonSquare,
    ) -> impl Iterator<Item = &'a (f64, Complex64, f64)> + 'a {
        let hw = q.half_width();
        let ranges: Vec<(usize, usize)> = if hw >= PI - 1e-9 {
            vec![(0, self.zero_atoms.len())]
        } else {
            // slack only widens the candidate window; `member` decides
            let slack = 1e-12;
            let lo = wrap_positive(q.center_angle - hw - slack);
            let hi = lo + 2.0 * (hw + slack);
            if hi < TAU {
                vec![(self.lower(lo), self.upper(hi))]
            } else {
                vec![
                    (self.lower(lo), self.zero_atoms.len()),
                    (0, self.upper(hi - TAU)),
                ]
            }
        };
        ranges
            .into_iter()
            .flat_map(move |(a, b)| self.zero_atoms[a..b.max(a)].iter())
            .filter(move |(_, w, _)| q.member(*w))
    }

    /// `μ(Q)`: listed zeros in `Q` plus `σ` of the closed boundary arc.
    pub fn mu_of_square(&self, q: &CarlesonSquare, tol: f64) -> Result<f64> {
        self.check_side(q)?;
        let inner: f64 = self.zeros_in(q).map(|a| a.2).sum();
        let boundary = match &self.boundary {
            None => 0.0,
            Some(s) => s.mass_of_arc(&q.boundary_arc(), true, tol)?,
        };
        Ok(inner + boundary)
    }

    /// Whether `μ(Q) > 0` holds with certainty.
    pub fn has_mass(&self, q: &CarlesonSquare) -> Result<bool> {
        self.check_side(q)?;
        if self.zeros_in(q).next().is_some() {
            return Ok(true);
        }
        Ok(self
            .boundary
            .as_ref()
            .map_or(false, |s| s.arc_has_mass(&q.boundary_arc())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::ZeroSequence;
    use crate::measures::AtomicMeasure;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sq(re: f64, im: f64) -> CarlesonSquare {
        CarlesonSquare::of_complex(c(re, im))
    }

    #[test]
    fn square_examples() {
        let th = InnerFunction::finite_blaschke(vec![c(0.9, 0.0)]).unwrap();
        assert_abs_diff_eq!(
            th.mu(0).mu_of_square(&sq(0.9, 0.0), 1e-12).unwrap(),
            0.1,
            epsilon = 1e-15
        );

        let s = InnerFunction::singular(AtomicMeasure::unit_atom(0.0).into());
        let mu = s.mu(0);
        for r in [0.01, 0.3, 0.9, 0.999999] {
            assert_eq!(mu.mu_of_square(&sq(r, 0.0), 1e-12).unwrap(), 1.0);
        }

        let th = InnerFunction::finite_blaschke(vec![Complex64::from_polar(0.9, 1.0)]).unwrap();
        assert_eq!(th.mu(0).mu_of_square(&sq(0.9, 0.0), 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn window_wraps_through_zero_angle() {
        let zs = vec![
            Complex64::from_polar(0.95, -0.01),
            Complex64::from_polar(0.95, 0.01),
            Complex64::from_polar(0.95, 3.0),
        ];
        let th = InnerFunction::finite_blaschke(zs).unwrap();
        let mu = th.mu(0);
        assert_abs_diff_eq!(mu.mu_of_square(&sq(0.9, 0.0), 1e-12).unwrap(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(mu.mu_of_square(&sq(0.0, 0.0), 1e-12).unwrap(), 0.15, epsilon = 1e-12);
    }

    #[test]
    fn horizon_is_enforced() {
        let th = InnerFunction::blaschke(ZeroSequence::radial_geometric(0.0));
        let mu = th.mu(10);
        assert!(matches!(
            mu.mu_of_square(&sq(1.0 - 1e-5, 0.0), 1e-12),
            Err(Error::HorizonExceeded { .. })
        ));
        let mu = MuMeasure::for_min_side(&th, 1e-5).unwrap();
        assert!(mu.horizon() < 1e-5);
        assert!(mu.has_mass(&sq(1.0 - 2e-5, 0.0)).unwrap());
    }

    #[test]
    fn agrees_with_linear_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let zs: Vec<_> = (0..300)
            .map(|_| Complex64::from_polar(rng.gen_range(0.5..0.999), rng.gen_range(-PI..PI)))
            .collect();
        let th = InnerFunction::finite_blaschke(zs.clone()).unwrap();
        let mu = th.mu(0);
        for _ in 0..500 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(-PI..PI));
            let q = CarlesonSquare::of_complex(z);
            let direct: f64 = zs
                .iter()
                .filter(|w| q.member(**w))
                .map(|w| 1.0 - w.norm())
                .sum();
            assert_abs_diff_eq!(mu.mu_of_square(&q, 1e-12).unwrap(), direct, epsilon = 1e-12);
        }
    }
}

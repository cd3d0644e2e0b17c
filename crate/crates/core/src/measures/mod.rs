//! Positive singular measures on the circle.

mod atomic;
mod cantor;
mod cdf;
pub(crate) mod quadrature;

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;

pub use atomic::AtomicMeasure;
pub use cantor::{CantorMeasure, DeltaSchedule, DEFAULT_DEPTH_CAP};
pub use cdf::CdfMeasure;

use crate::bounds::Enclosure;
use crate::boundary::BoundarySet;
use crate::error::{Error, Result};
use crate::geometry::{angular_distance, wrap_angle, BoundaryArc};
use quadrature::{Cell, CellMeasure};

/// Constant in `P[σ](z) ≥ C·σ(I(z))/(1-|z|)`, `I(z)` the arc of length `1-|z|` centered at `z/|z|`.
///
/// On `I(z)`, `|z - e^{iθ}|² ≤ (1-r)² + r(1-r)²/4 ≤ 5(1-r)²/4`, so the kernel is at least `4(1+r)/(5(1-r))`.
pub const POISSON_ARC_CONSTANT: f64 = 0.8;

/// Poisson kernel `(1-|z|²)/|z - e^{iθ}|²` as a function of `r = |z|` and the angular offset.
pub fn poisson_kernel(r: f64, offset: f64) -> f64 {
    let s = (0.5 * offset).sin();
    let one_minus = 1.0 - r;
    one_minus * (1.0 + r) / (one_minus * one_minus + 4.0 * r * s * s)
}

pub fn poisson_kernel_at(z: Complex64, theta: f64) -> f64 {
    let r = z.norm();
    if r == 0.0 {
        return 1.0;
    }
    poisson_kernel(r, angular_distance(theta, z.im.atan2(z.re)))
}

/// `(z + ξ)/(z - ξ)` with `ξ = e^{iθ}`.
pub fn herglotz_kernel(z: Complex64, theta: f64) -> Complex64 {
    let xi = Complex64::from_polar(1.0, theta);
    (z + xi) / (z - xi)
}

/// Smallest and largest angular offset from `phi` over the arc `[start, start + len]`.
fn offset_range(phi: f64, start: f64, len: f64) -> (f64, f64) {
    if len >= TAU {
        return (0.0, PI);
    }
    let off = crate::geometry::wrap_positive(phi - start);
    let dmin = if off <= len {
        0.0
    } else {
        (off - len).min(TAU - off)
    };
    // the antipode of phi lies in the arc iff offset range straddles π
    let anti = crate::geometry::wrap_positive(phi + PI - start);
    let dmax = if anti <= len {
        PI
    } else {
        angular_distance(phi, start).max(angular_distance(phi, start + len))
    };
    (dmin, dmax)
}

#[derive(Debug, Clone)]
pub enum SingularMeasure {
    Atomic(AtomicMeasure),
    Cantor(Arc<CantorMeasure>),
    Cdf(CdfMeasure),
}

impl From<AtomicMeasure> for SingularMeasure {
    fn from(m: AtomicMeasure) -> Self {
        SingularMeasure::Atomic(m)
    }
}

impl From<CantorMeasure> for SingularMeasure {
    fn from(m: CantorMeasure) -> Self {
        SingularMeasure::Cantor(Arc::new(m))
    }
}

impl From<CdfMeasure> for SingularMeasure {
    fn from(m: CdfMeasure) -> Self {
        SingularMeasure::Cdf(m)
    }
}

impl CellMeasure for CantorMeasure {
    fn roots(&self) -> Vec<Cell> {
        vec![Cell::Cantor {
            n: 0,
            start: Default::default(),
        }]
    }
    fn mass(&self, cell: &Cell) -> f64 {
        match cell {
            Cell::Cantor { n, .. } => (-(*n as f64)).exp2(),
            Cell::Span { .. } => unreachable!("Cantor cells only"),
        }
    }
    fn length(&self, cell: &Cell) -> f64 {
        match cell {
            Cell::Cantor { n, .. } => CantorMeasure::length(self, *n),
            Cell::Span { a, b, .. } => b - a,
        }
    }
    fn split(&self, cell: &Cell) -> Option<[Cell; 2]> {
        match *cell {
            Cell::Cantor { n, start } if n < self.depth_cap() => Some([
                Cell::Cantor { n: n + 1, start },
                Cell::Cantor {
                    n: n + 1,
                    start: start.add(self.right_shift(n)),
                },
            ]),
            _ => None,
        }
    }
}

const SPAN_DEPTH_CAP: u32 = 60;

impl CellMeasure for CdfMeasure {
    fn roots(&self) -> Vec<Cell> {
        self.samples()
            .windows(2)
            .filter(|w| w[1].1 > w[0].1)
            .map(|w| Cell::Span {
                a: w[0].0,
                b: w[1].0,
                depth: 0,
            })
            .collect()
    }
    fn mass(&self, cell: &Cell) -> f64 {
        match *cell {
            Cell::Span { a, b, .. } => (self.cdf(b) - self.cdf(a)).max(0.0),
            Cell::Cantor { .. } => unreachable!("span cells only"),
        }
    }
    fn length(&self, cell: &Cell) -> f64 {
        match *cell {
            Cell::Span { a, b, .. } => b - a,
            Cell::Cantor { .. } => unreachable!("span cells only"),
        }
    }
    fn split(&self, cell: &Cell) -> Option<[Cell; 2]> {
        match *cell {
            Cell::Span { a, b, depth } if depth < SPAN_DEPTH_CAP => {
                let m = 0.5 * (a + b);
                (m > a && m < b).then_some([
                    Cell::Span { a, b: m, depth: depth + 1 },
                    Cell::Span { a: m, b, depth: depth + 1 },
                ])
            }
            _ => None,
        }
    }
}

impl SingularMeasure {
    pub fn total_mass(&self) -> f64 {
        match self {
            SingularMeasure::Atomic(a) => a.total_mass(),
            SingularMeasure::Cantor(c) => c.total_mass(),
            SingularMeasure::Cdf(c) => c.total_mass(),
        }
    }

    /// `σ(I)`. Atomic measures count listed atoms only (endpoints iff `closed_ends`);
    /// Cantor and CDF measures have no atoms so `closed_ends` is immaterial.
    pub fn mass_of_arc(&self, arc: &BoundaryArc, closed_ends: bool, tol: f64) -> Result<f64> {
        match self {
            SingularMeasure::Atomic(a) => Ok(a.mass_of_arc(arc, closed_ends)),
            SingularMeasure::Cantor(c) => {
                let (lo, hi) = c.arc_mass_bracket(arc.start(), arc.length());
                if hi - lo > tol {
                    return Err(Error::PrecisionExhausted { lo, hi });
                }
                Ok(0.5 * (lo + hi))
            }
            SingularMeasure::Cdf(c) => Ok(c.arc_mass(arc.start(), arc.length())),
        }
    }

    /// Whether the closed arc certainly carries positive mass.
    pub fn arc_has_mass(&self, arc: &BoundaryArc) -> bool {
        match self {
            SingularMeasure::Atomic(a) => a.mass_of_arc(arc, true) > 0.0,
            SingularMeasure::Cantor(c) => c.arc_mass_bracket(arc.start(), arc.length()).0 > 0.0,
            SingularMeasure::Cdf(c) => c.arc_mass(arc.start(), arc.length()) > 0.0,
        }
    }

    /// `P[σ](z)` within absolute error `tol`.
    pub fn poisson_integral(&self, z: Complex64, tol: f64) -> Result<Enclosure> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        let phi = z.im.atan2(z.re);
        match self {
            SingularMeasure::Atomic(a) => {
                let sum: f64 = a
                    .atoms()
                    .iter()
                    .map(|&(t, m)| m * poisson_kernel_at(z, t))
                    .sum();
                let tail = a.tail_mass() * (1.0 + r) / (1.0 - r);
                if tail > tol {
                    return Err(Error::PrecisionExhausted { lo: sum, hi: sum + tail });
                }
                Ok(Enclosure::new(sum, sum + 0.5 * tail, sum + tail))
            }
            SingularMeasure::Cantor(c) => {
                quadrature::integrate(c.as_ref(), tol, |s, l, m| {
                    symmetric_kernel_bracket(r, phi, s, l, m)
                })
            }
            SingularMeasure::Cdf(c) => {
                quadrature::integrate(c, tol, |s, l, m| kernel_bracket(r, phi, s, l, m))
            }
        }
    }

    /// `P[σ](z)` refined only until `exp(-P)` is known within `tol`.
    pub fn poisson_for_modulus(&self, z: Complex64, tol: f64) -> Result<Enclosure> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        let accept = |lo: f64, hi: f64| (-lo).exp() - (-hi).exp() <= tol * (1.0 + 1e-9);
        let phi = z.im.atan2(z.re);
        match self {
            SingularMeasure::Atomic(a) => {
                let sum: f64 = a
                    .atoms()
                    .iter()
                    .map(|&(t, m)| m * poisson_kernel_at(z, t))
                    .sum();
                let tail = a.tail_mass() * (1.0 + r) / (1.0 - r);
                if !accept(sum, sum + tail) {
                    return Err(Error::PrecisionExhausted { lo: sum, hi: sum + tail });
                }
                Ok(Enclosure::new(sum, sum + 0.5 * tail, sum + tail))
            }
            SingularMeasure::Cantor(c) => quadrature::integrate_until(
                c.as_ref(),
                |s, l, m| symmetric_kernel_bracket(r, phi, s, l, m),
                accept,
            ),
            SingularMeasure::Cdf(c) => {
                quadrature::integrate_until(c, |s, l, m| kernel_bracket(r, phi, s, l, m), accept)
            }
        }
    }

    /// `∫ (z + ξ)/(z - ξ) dσ(ξ)`; the real part is exactly `-P[σ](z)`, the imaginary part is
    /// within `tol`.
    pub fn herglotz_integral(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let p = self.poisson_integral(z, tol)?;
        let im = self.herglotz_imag(z, tol)?;
        Ok(Complex64::new(-p.estimate, im.estimate))
    }

    /// Imaginary part of the Herglotz integral as an enclosure.
    pub fn herglotz_imag(&self, z: Complex64, tol: f64) -> Result<Enclosure> {
        let r = z.norm();
        if r >= 1.0 {
            return Err(Error::Domain(format!("|z| = {r} ≥ 1")));
        }
        let phi = z.im.atan2(z.re);
        match self {
            SingularMeasure::Atomic(a) => {
                let sum: f64 = a
                    .atoms()
                    .iter()
                    .map(|&(t, m)| m * herglotz_kernel(z, t).im)
                    .sum();
                // |Im kernel| ≤ 2r/|z - ξ|² ≤ 2r/(1-r)²
                let tail = a.tail_mass() * 2.0 * r / ((1.0 - r) * (1.0 - r));
                if tail > tol {
                    return Err(Error::PrecisionExhausted { lo: sum - tail, hi: sum + tail });
                }
                Ok(Enclosure::new(sum - 0.5 * tail, sum, sum + 0.5 * tail))
            }
            SingularMeasure::Cantor(c) => {
                quadrature::integrate(c.as_ref(), tol, |s, l, m| {
                    symmetric_imag_bracket(z, r, phi, s, l, m)
                })
            }
            SingularMeasure::Cdf(c) => {
                quadrature::integrate(c, tol, |s, l, m| imag_bracket(z, r, phi, s, l, m))
            }
        }
    }

    /// Grid surrogate for `liminf_{h→0} σ({ψ : |ψ - ξ| < h})/h` (chord distance).
    pub fn density_liminf(&self, xi: f64, h_grid: &[f64]) -> Result<f64> {
        let mut best = f64::INFINITY;
        for &h in h_grid {
            if !(h > 0.0) {
                return Err(Error::InvalidInput(format!("grid step {h} must be positive")));
            }
            let half = if h >= 2.0 { PI } else { 2.0 * (0.5 * h).asin() };
            let arc = BoundaryArc::new(xi, half)?;
            let mass = self.mass_of_arc(&arc, false, 1e-12 * h)?;
            best = best.min(mass / h);
        }
        Ok(best)
    }

    /// Closed support as a boundary set.
    pub fn support(&self) -> BoundarySet {
        match self {
            SingularMeasure::Atomic(a) => BoundarySet::Points(a.support_points()),
            SingularMeasure::Cantor(c) => BoundarySet::Cantor(c.clone()),
            SingularMeasure::Cdf(c) => BoundarySet::Arcs(
                c.increasing_intervals()
                    .into_iter()
                    .map(|(a, b)| (wrap_angle(a), b - a))
                    .collect(),
            ),
        }
    }
}

/// Default density grid `h = 2^{-k}`, `k = 3..=20`.
pub fn default_density_grid() -> Vec<f64> {
    (3..=20).map(|k| (-(k as f64)).exp2()).collect()
}

fn kernel_bracket(r: f64, phi: f64, start: f64, len: f64, mass: f64) -> (f64, f64, f64) {
    if r == 0.0 {
        return (mass, mass, mass);
    }
    let (dmin, dmax) = offset_range(phi, start, len);
    let mid = angular_distance(phi, start + 0.5 * len);
    let hi = mass * poisson_kernel(r, dmin);
    let lo = mass * poisson_kernel(r, dmax);
    let est = mass * poisson_kernel(r, mid);
    (lo, est.clamp(lo, hi), hi)
}

/// Offset at which the Poisson kernel turns from concave (near `φ`) to convex.
fn poisson_inflection(r: f64) -> f64 {
    let b = 1.0 + r * r;
    let c = 2.0 * r;
    // 1 - cos Δ* in a cancellation-free form
    let one_minus_u = 2.0 * (1.0 - r) * (1.0 - r) / (2.0 * c + b + (b * b + 8.0 * c * c).sqrt());
    2.0 * (0.5 * one_minus_u).sqrt().min(1.0).asin()
}

/// Second-order bracket for cells whose mass is symmetric about the cell midpoint: on a cell
/// where the kernel is convex the symmetric average lies between the midpoint value and the
/// endpoint mean (reversed when concave).
fn symmetric_kernel_bracket(r: f64, phi: f64, start: f64, len: f64, mass: f64) -> (f64, f64, f64) {
    if r == 0.0 {
        return (mass, mass, mass);
    }
    let (dmin, dmax) = offset_range(phi, start, len);
    let infl = poisson_inflection(r);
    let convex = dmin >= infl * (1.0 + 1e-9);
    let concave = dmax <= infl * (1.0 - 1e-9);
    if !(convex || concave) {
        return kernel_bracket(r, phi, start, len, mass);
    }
    let k = |t: f64| poisson_kernel(r, angular_distance(phi, t));
    let mid = mass * k(start + 0.5 * len);
    let ends = mass * 0.5 * (k(start) + k(start + len));
    let (lo, hi) = if convex { (mid, ends) } else { (ends, mid) };
    if !(lo <= hi) {
        // curvature below rounding level
        return kernel_bracket(r, phi, start, len, mass);
    }
    let slack = 4.0 * f64::EPSILON * hi;
    let (lo, hi) = ((lo - slack).max(0.0), hi + slack);
    (lo, ((2.0 * mid + ends) / 3.0).clamp(lo, hi), hi)
}

fn imag_bracket(z: Complex64, r: f64, phi: f64, start: f64, len: f64, mass: f64) -> (f64, f64, f64) {
    let (dmin, _) = offset_range(phi, start, len);
    let s = (0.5 * dmin).sin();
    let chord_sq = (1.0 - r) * (1.0 - r) + 4.0 * r * s * s;
    let lip = 2.0 * r / chord_sq;
    let est = mass * herglotz_kernel(z, start + 0.5 * len).im;
    let slack = mass * 0.5 * len * lip;
    (est - slack, est, est + slack)
}

/// Midpoint bracket for symmetric cells: the first-order Taylor term cancels, leaving
/// `(len/2)²/2 · sup|K''|` with `|K''| ≤ 2r/d² + 4r²/d³`, `d` the least chord to `z`.
fn symmetric_imag_bracket(
    z: Complex64,
    r: f64,
    phi: f64,
    start: f64,
    len: f64,
    mass: f64,
) -> (f64, f64, f64) {
    let (dmin, _) = offset_range(phi, start, len);
    let s = (0.5 * dmin).sin();
    let d = ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s).sqrt();
    let est = mass * herglotz_kernel(z, start + 0.5 * len).im;
    let first = mass * 0.5 * len * 2.0 * r / (d * d);
    let second = mass * 0.125 * len * len * (2.0 * r / (d * d) + 4.0 * r * r / (d * d * d));
    let slack = first.min(second) + mass * 8.0 * f64::EPSILON / d;
    (est - slack, est, est + slack)
}

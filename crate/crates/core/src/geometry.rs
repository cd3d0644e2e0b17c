//! Hyperbolic and Carleson geometry of the unit disc.
//!
//! Angles are radians. Comparisons reduce differences to `(-π, π]`; dyadic
//! boxes index the circle on `[0, 2π)` with half-open angular ranges.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce an angle to `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % TAU;
    if t <= -PI {
        t += TAU;
    } else if t > PI {
        t -= TAU;
    }
    t
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_positive(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Unsigned angular separation in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Euclidean chord length between `e^{ia}` and `e^{ib}`.
pub fn chord(a: f64, b: f64) -> f64 {
    2.0 * (0.5 * angular_distance(a, b)).sin()
}

/// A point of the open disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint {
    pub re: f64,
    pub im: f64,
}

impl DiscPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let p = DiscPoint { re, im };
        if !(re.is_finite() && im.is_finite()) || p.modulus() >= 1.0 {
            return Err(Error::Domain(format!(
                "point ({re}, {im}) is not in the open unit disc"
            )));
        }
        Ok(p)
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::from_complex(Complex64::from_polar(r, theta))
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn modulus(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(self) -> f64 {
        self.im.atan2(self.re)
    }
}

impl From<DiscPoint> for Complex64 {
    fn from(p: DiscPoint) -> Self {
        p.to_complex()
    }
}

/// `1 - |z|^2` evaluated without cancellation near the circle.
pub fn one_minus_mod_sq(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// `1 - ρ(z, w)^2 = (1-|z|²)(1-|w|²)/|1 - w̄z|²`.
pub fn one_minus_rho_sq(z: Complex64, w: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm_sqr();
    (one_minus_mod_sq(z) * one_minus_mod_sq(w) / den).min(1.0)
}

/// Pseudohyperbolic distance on raw complex numbers; callers guarantee `|z|, |w| < 1`.
pub fn rho(z: Complex64, w: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
    ((z - w).norm() / den).min(1.0)
}

/// `ρ(z, w) = |(z - w)/(1 - z̄w)|`.
pub fn pseudo_distance(z: DiscPoint, w: DiscPoint) -> f64 {
    rho(z.to_complex(), w.to_complex())
}

/// Checked variant for raw coordinates.
pub fn pseudo_distance_checked(z: Complex64, w: Complex64) -> Result<f64> {
    Ok(pseudo_distance(
        DiscPoint::from_complex(z)?,
        DiscPoint::from_complex(w)?,
    ))
}

/// The disc automorphism `φ_a(u) = (a - u)/(1 - āu)`.
pub fn mobius(a: Complex64, u: Complex64) -> Complex64 {
    (a - u) / (Complex64::new(1.0, 0.0) - a.conj() * u)
}

/// A closed arc of the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryArc {
    pub center_angle: f64,
    pub half_width: f64,
}

impl BoundaryArc {
    pub fn new(center_angle: f64, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width <= PI) || !center_angle.is_finite() {
            return Err(Error::Domain(format!(
                "arc half width {half_width} outside (0, π]"
            )));
        }
        Ok(BoundaryArc {
            center_angle: wrap_angle(center_angle),
            half_width,
        })
    }

    /// Arc running counter-clockwise from `start` to `end`.
    pub fn from_endpoints(start: f64, end: f64) -> Result<Self> {
        let span = end - start;
        Self::new(start + 0.5 * span, 0.5 * span)
    }

    pub fn start(&self) -> f64 {
        self.center_angle - self.half_width
    }

    pub fn end(&self) -> f64 {
        self.center_angle + self.half_width
    }

    pub fn length(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn is_full(&self) -> bool {
        self.half_width >= PI
    }

    pub fn contains(&self, theta: f64, closed: bool) -> bool {
        if self.is_full() {
            return true;
        }
        let d = angular_distance(theta, self.center_angle);
        if closed {
            d <= self.half_width
        } else {
            d < self.half_width
        }
    }

    /// Angular distance from the arc to a boundary point; zero inside.
    pub fn distance_to(&self, theta: f64) -> f64 {
        (angular_distance(theta, self.center_angle) - self.half_width).max(0.0)
    }
}

/// Carleson square `Q(z) = {w : |arg z - arg w| ≤ ℓ/2, |w| ≥ |z|}` with `ℓ = 1 - |z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub base_modulus: f64,
    pub center_angle: f64,
    side: f64,
    full_circle: bool,
}

impl CarlesonSquare {
    /// `Q(z)`; `Q(0)` is the closed disc.
    pub fn of_point(z: DiscPoint) -> Self {
        Self::of_complex(z.to_complex())
    }

    /// `Q(z)` for a raw point; callers guarantee `|z| < 1`.
    pub fn of_complex(z: Complex64) -> Self {
        let r = z.norm();
        if r == 0.0 {
            return CarlesonSquare {
                base_modulus: 0.0,
                center_angle: 0.0,
                side: 1.0,
                full_circle: true,
            };
        }
        CarlesonSquare {
            base_modulus: r,
            center_angle: z.im.atan2(z.re),
            side: 1.0 - r,
            full_circle: false,
        }
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Angular half-width, capped at π.
    pub fn half_width(&self) -> f64 {
        if self.full_circle {
            return PI;
        }
        (0.5 * self.side).min(PI)
    }

    /// Membership for points of the closed disc.
    pub fn member(&self, w: Complex64) -> bool {
        let m = w.norm();
        if m > 1.0 || m < self.base_modulus {
            return false;
        }
        let hw = self.half_width();
        if hw >= PI {
            return true;
        }
        if m == 0.0 {
            return false;
        }
        angular_distance(w.im.atan2(w.re), self.center_angle) <= hw
    }

    /// `λQ`: same center angle, side multiplied by `λ`, base modulus floored at 0.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 1.0) {
            return Err(Error::Domain(format!("dilation factor {lambda} < 1")));
        }
        let side = self.side * lambda;
        Ok(CarlesonSquare {
            base_modulus: (1.0 - side).max(0.0),
            center_angle: self.center_angle,
            side,
            full_circle: self.full_circle,
        })
    }

    /// The arc `Q ∩ ∂D`.
    pub fn boundary_arc(&self) -> BoundaryArc {
        BoundaryArc {
            center_angle: self.center_angle,
            half_width: self.half_width().max(f64::MIN_POSITIVE),
        }
    }
}

/// Dyadic Carleson box `Q_{n,k} = {re^{iθ}: 1-π2^{-n} ≤ r < 1, 2πk2^{-n} ≤ θ < 2π(k+1)2^{-n}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WhitneyBox {
    pub depth: u32,
    pub index: u64,
}

impl WhitneyBox {
    pub fn new(depth: u32, index: u64) -> Result<Self> {
        if depth < 2 || depth > 60 || index >= (1u64 << depth) {
            return Err(Error::Domain(format!("no dyadic box ({depth}, {index})")));
        }
        Ok(WhitneyBox { depth, index })
    }

    fn scale(&self) -> f64 {
        (-(self.depth as f64)).exp2()
    }

    pub fn inner_radius(&self) -> f64 {
        1.0 - PI * self.scale()
    }

    /// Outer radius of the top half.
    pub fn top_radius(&self) -> f64 {
        1.0 - 0.5 * PI * self.scale()
    }

    pub fn angle_start(&self) -> f64 {
        TAU * self.index as f64 * self.scale()
    }

    pub fn angle_width(&self) -> f64 {
        TAU * self.scale()
    }

    /// Box containing `z` at this depth, if `z` reaches the annulus.
    pub fn locate(z: Complex64, depth: u32) -> Option<Self> {
        let r = z.norm();
        let scale = (-(depth as f64)).exp2();
        if r >= 1.0 || r < 1.0 - PI * scale {
            return None;
        }
        let theta = wrap_positive(z.im.atan2(z.re));
        let k = ((theta / (TAU * scale)).floor() as u64).min((1u64 << depth) - 1);
        Some(WhitneyBox { depth, index: k })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        WhitneyBox::locate(z, self.depth) == Some(*self)
    }

    pub fn in_top_half(&self, z: Complex64) -> bool {
        self.contains(z) && z.norm() <= self.top_radius()
    }

    pub fn top_half_center(&self) -> Complex64 {
        let r = 0.5 * (self.inner_radius() + self.top_radius());
        Complex64::from_polar(r, self.angle_start() + 0.5 * self.angle_width())
    }

    pub fn parent(&self) -> Option<Self> {
        (self.depth > 2).then(|| WhitneyBox {
            depth: self.depth - 1,
            index: self.index / 2,
        })
    }

    pub fn children(&self) -> [Self; 2] {
        [
            WhitneyBox {
                depth: self.depth + 1,
                index: 2 * self.index,
            },
            WhitneyBox {
                depth: self.depth + 1,
                index: 2 * self.index + 1,
            },
        ]
    }

    /// Angular neighbors at the same depth (cyclic).
    pub fn angular_neighbors(&self) -> [Self; 2] {
        let n = 1u64 << self.depth;
        [
            WhitneyBox {
                depth: self.depth,
                index: (self.index + n - 1) % n,
            },
            WhitneyBox {
                depth: self.depth,
                index: (self.index + 1) % n,
            },
        ]
    }
}

/// Stolz angle `{z : |z - e^{iθ}| < α(1 - |z|)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzAngle {
    pub vertex_angle: f64,
    pub aperture: f64,
}

impl StolzAngle {
    pub fn new(vertex_angle: f64, aperture: f64) -> Result<Self> {
        if !(aperture > 1.0) {
            return Err(Error::Domain(format!("Stolz aperture {aperture} must exceed 1")));
        }
        Ok(StolzAngle {
            vertex_angle,
            aperture,
        })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let v = Complex64::from_polar(1.0, self.vertex_angle);
        (z - v).norm() < self.aperture * (1.0 - z.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::new(re, im).unwrap()
    }

    #[test]
    fn pseudo_distance_examples() {
        assert_abs_diff_eq!(pseudo_distance(p(0.0, 0.0), p(0.7, 0.0)), 0.7, epsilon = 1e-15);
        assert_eq!(pseudo_distance(p(0.3, -0.2), p(0.3, -0.2)), 0.0);
        assert_abs_diff_eq!(pseudo_distance(p(0.5, 0.0), p(0.8, 0.0)), 0.5, epsilon = 1e-15);
        assert!(pseudo_distance_checked(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn one_minus_rho_sq_matches_direct() {
        let z = Complex64::new(0.3, 0.4);
        let w = Complex64::new(-0.5, 0.1);
        let r = rho(z, w);
        assert_abs_diff_eq!(one_minus_rho_sq(z, w), 1.0 - r * r, epsilon = 1e-14);
    }

    #[test]
    fn carleson_square_examples() {
        let q = CarlesonSquare::of_point(p(0.9, 0.0));
        assert!(q.member(Complex64::from_polar(0.95, 0.04)));
        assert!(!q.member(Complex64::from_polar(0.95, 0.06)));
        assert!(!q.member(Complex64::from_polar(0.85, 0.0)));
        assert!(q.member(Complex64::from_polar(1.0, 0.0499)));
        let d = q.dilate(2.0).unwrap();
        assert_abs_diff_eq!(d.side(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(d.base_modulus, 0.8, epsilon = 1e-15);
        assert!(q.dilate(0.5).is_err());
        assert_eq!(q.dilate(20.0).unwrap().base_modulus, 0.0);
    }

    #[test]
    fn origin_square_is_closed_disc() {
        let q = CarlesonSquare::of_point(p(0.0, 0.0));
        assert!(q.member(Complex64::new(0.0, 0.0)));
        assert!(q.member(Complex64::from_polar(1.0, 2.5)));
        assert!(q.member(Complex64::from_polar(0.3, -1.0)));
    }

    #[test]
    fn whitney_box_geometry() {
        let b = WhitneyBox::new(3, 5).unwrap();
        assert!(b.contains(b.top_half_center()));
        assert!(b.in_top_half(b.top_half_center()));
        assert_eq!(b.parent(), Some(WhitneyBox { depth: 2, index: 2 }));
        assert_eq!(b.children()[1], WhitneyBox { depth: 4, index: 11 });
        assert_eq!(WhitneyBox::new(2, 0).unwrap().angular_neighbors()[0].index, 3);
        assert!(WhitneyBox::new(1, 0).is_err());
        assert!(WhitneyBox::new(3, 8).is_err());
        // ties on angular boundaries go to the lower-index side of the half-open range
        let edge = Complex64::from_polar(0.9, TAU * 2.0 / 8.0 + 1e-15);
        assert_eq!(WhitneyBox::locate(edge, 3).unwrap().index, 2);
    }

    #[test]
    fn stolz_membership() {
        let s = StolzAngle::new(0.0, 2.0).unwrap();
        assert!(s.contains(Complex64::new(0.9, 0.0)));
        assert!(!s.contains(Complex64::from_polar(0.99, 0.5)));
        assert!(StolzAngle::new(0.0, 1.0).is_err());
    }

    #[test]
    fn arcs() {
        let a = BoundaryArc::new(0.0, 0.1).unwrap();
        assert!(a.contains(0.1, true));
        assert!(!a.contains(0.1, false));
        assert!(a.contains(-0.05, false));
        assert_abs_diff_eq!(a.distance_to(0.3), 0.2, epsilon = 1e-15);
        let w = BoundaryArc::new(PI, 0.2).unwrap();
        assert!(w.contains(-PI + 0.1, true));
        assert!(BoundaryArc::new(0.0, 4.0).is_err());
    }
}

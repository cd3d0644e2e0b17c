use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]` known to contain a quantity, with a point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub estimate: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn exact(x: f64) -> Self {
        Enclosure {
            lo: x,
            estimate: x,
            hi: x,
        }
    }

    pub fn new(lo: f64, estimate: f64, hi: f64) -> Self {
        Enclosure {
            lo,
            estimate: estimate.clamp(lo, hi),
            hi,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn neg(self) -> Self {
        Enclosure {
            lo: -self.hi,
            estimate: -self.estimate,
            hi: -self.lo,
        }
    }

    pub fn add(self, other: Self) -> Self {
        Enclosure {
            lo: self.lo + other.lo,
            estimate: self.estimate + other.estimate,
            hi: self.hi + other.hi,
        }
    }
}

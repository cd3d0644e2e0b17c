use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, BoundaryArc};

/// `Σ α_n δ_{e^{iθ_n}}`, possibly a truncation of an infinite family.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(f64, f64)>,
    tail_mass: f64,
    accumulation: Vec<f64>,
}

impl AtomicMeasure {
    /// `atoms` are `(θ, α)` pairs; `tail_mass` bounds the mass of unlisted atoms.
    pub fn new(atoms: Vec<(f64, f64)>, tail_mass: f64) -> Result<Self> {
        if !(tail_mass >= 0.0 && tail_mass.is_finite()) {
            return Err(Error::InvalidInput(format!("tail mass {tail_mass} must be ≥ 0")));
        }
        if atoms.is_empty() && tail_mass == 0.0 {
            return Err(Error::InvalidInput("atomic measure has no mass".into()));
        }
        let mut normalized = Vec::with_capacity(atoms.len());
        for (theta, mass) in atoms {
            if !(mass > 0.0 && mass.is_finite() && theta.is_finite()) {
                return Err(Error::InvalidInput(format!("atom ({theta}, {mass}) invalid")));
            }
            normalized.push((wrap_angle(theta), mass));
        }
        let mut sorted: Vec<f64> = normalized.iter().map(|a| a.0).collect();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("atom angles must be distinct".into()));
        }
        Ok(AtomicMeasure {
            atoms: normalized,
            tail_mass,
            accumulation: Vec::new(),
        })
    }

    pub fn unit_atom(theta: f64) -> Self {
        Self::new(vec![(theta, 1.0)], 0.0).expect("unit atom is valid")
    }

    /// Declare accumulation points of an infinite family (part of the closed support).
    pub fn with_accumulation(mut self, points: Vec<f64>) -> Self {
        self.accumulation = points.into_iter().map(wrap_angle).collect();
        self
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn accumulation(&self) -> &[f64] {
        &self.accumulation
    }

    pub fn listed_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.listed_mass() + self.tail_mass
    }

    /// Mass of listed atoms inside the arc; the tail is not located and is excluded.
    pub fn mass_of_arc(&self, arc: &BoundaryArc, closed_ends: bool) -> f64 {
        self.atoms
            .iter()
            .filter(|(t, _)| arc.contains(*t, closed_ends))
            .map(|a| a.1)
            .sum()
    }

    /// Support points: listed atoms plus declared accumulation points.
    pub fn support_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .atoms
            .iter()
            .map(|a| a.0)
            .chain(self.accumulation.iter().copied())
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    pub fn rotated(&self, alpha: f64) -> Self {
        AtomicMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|&(t, m)| (wrap_angle(t + alpha), m))
                .collect(),
            tail_mass: self.tail_mass,
            accumulation: self.accumulation.iter().map(|t| wrap_angle(t + alpha)).collect(),
        }
    }
}

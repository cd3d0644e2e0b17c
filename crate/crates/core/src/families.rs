//! The six reference families used by the acceptance suite and `--seed-examples`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::classifier::Verdict;
use crate::inner::{InnerFunction, ZeroSequence};
use crate::measures::{AtomicMeasure, CantorMeasure, SingularMeasure};

/// Atoms listed for the accumulating family; the rest is carried as tail mass.
pub const EXAMPLE1_ATOMS: usize = 60;

pub fn single_atom() -> InnerFunction {
    InnerFunction::singular(AtomicMeasure::unit_atom(0.0).into())
}

pub fn two_atoms() -> InnerFunction {
    let m = AtomicMeasure::new(vec![(0.0, 1.0), (PI, 1.0)], 0.0).expect("distinct atoms");
    InnerFunction::singular(m.into())
}

/// Atoms of mass `8^{-n}` at angles `2^{-n}`, accumulating at angle 0.
pub fn example1_measure() -> SingularMeasure {
    let atoms = (1..=EXAMPLE1_ATOMS)
        .map(|n| ((-(n as f64)).exp2(), (-3.0 * n as f64).exp2()))
        .collect();
    let tail = (-3.0 * EXAMPLE1_ATOMS as f64).exp2() / 7.0;
    AtomicMeasure::new(atoms, tail)
        .expect("positive distinct atoms")
        .with_accumulation(vec![0.0])
        .into()
}

pub fn example1() -> InnerFunction {
    InnerFunction::singular(example1_measure())
}

pub fn cantor() -> InnerFunction {
    InnerFunction::singular(CantorMeasure::middle_thirds().into())
}

pub fn radial_geometric() -> InnerFunction {
    InnerFunction::blaschke(ZeroSequence::radial_geometric(0.0))
}

pub fn radial_sparse() -> InnerFunction {
    InnerFunction::blaschke(ZeroSequence::radial_sparse(0.0))
}

/// The Möbius map `(0.5 - z)/(1 - 0.5z)`.
pub fn mobius() -> InnerFunction {
    InnerFunction::finite_blaschke(vec![Complex64::new(0.5, 0.0)]).expect("one zero")
}

/// `(name, Θ, expected verdict)` for every seeded family.
pub fn seeded() -> Vec<(&'static str, InnerFunction, Verdict)> {
    use Verdict::*;
    vec![
        ("single_atom", single_atom(), OneComponentEvidence),
        ("two_atoms", two_atoms(), OneComponentEvidence),
        ("example1", example1(), NotOneComponentEvidence),
        ("cantor", cantor(), OneComponentEvidence),
        ("radial_geometric", radial_geometric(), OneComponentEvidence),
        ("radial_sparse", radial_sparse(), NotOneComponentEvidence),
    ]
}

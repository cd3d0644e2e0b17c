//! Inner functions on the unit disc.
//!
//! Evaluation of Blaschke products and singular inner functions with certified
//! error bounds, a numeric one-component classifier built on Carleson-square
//! scans, and the construction of companion interpolating Blaschke products
//! whose zeros form a chain at fixed pseudohyperbolic spacing.

pub mod boundary;
pub mod classifier;
pub mod companion;
pub mod bounds;
pub mod error;
pub mod families;
pub mod geometry;
pub mod inner;
pub mod io;
pub mod measures;

pub use bounds::Enclosure;
pub use error::{Error, Result};

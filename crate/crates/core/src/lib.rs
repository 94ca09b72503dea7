//! Microstate counting under coherent access, the modified Bose-Einstein and
//! Boltzmann laws that follow from it, a moment-constrained maximum-entropy
//! solver, and q-exponential (Tsallis) tooling.
//!
//! Counting is exact (arbitrary precision). Everything else runs in `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod counting;
pub mod distributions;
mod error;
pub mod maxent;
pub mod tsallis;

pub use counting::{BigCount, LevelSpec, MacrostateSpec, OccupationMap, Subset};
pub use distributions::{DiscreteDistribution, ExponentSeries};
pub use error::{Error, Result};
pub use maxent::{MomentConstraints, MultiplierSolution};
pub use tsallis::QParams;

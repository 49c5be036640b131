//! Cusp excursions of horocycle flows on the modular surface `SL(2,Z)\SL(2,R)`.
//!
//! The crate computes the hitting process of a Poincaré section in the cusp
//! exactly (by lattice-point enumeration), evaluates the closed-form limit
//! laws, and runs seeded Monte-Carlo experiments comparing the two.

pub mod dist;
pub mod error;
pub mod cli;
pub mod lattice;
pub mod mc;
pub mod quad;
pub mod rng;
pub mod section;
pub mod sl2;

pub use error::{Error, Result};

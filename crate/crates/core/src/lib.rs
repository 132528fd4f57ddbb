//! Solution-space geometry of random k-CNF formulas.
//!
//! The crate is split into four layers:
//!
//! - [`cnf`]: assignments, clauses, formulas, Hamming geometry and clause-universe counting.
//! - [`samplers`]: seeded generators for the uniform, planted, doubly-planted and
//!   uniform-satisfiable formula distributions.
//! - [`enumerate`]: exact AllSAT enumeration, diameters, distance profiles and maximal
//!   satisfying assignments.
//! - [`analytic`]: first-moment rate functions, grid certificates and threshold finders,
//!   generic over the floating point scalar.
//!
//! Everything combinatorial is exact; floating point only appears in [`analytic`].

pub mod analytic;
pub mod cnf;
pub mod enumerate;
mod error;
pub mod num;
pub mod samplers;

pub use error::{Error, Result};

pub use cnf::{
    clause_universe_size, evaluate, hamming, Assignment, Clause, Formula, Literal,
    PlantedInstance, UniverseMode,
};
pub use enumerate::{DistanceProfile, Enumerator, SolutionSet};
pub use num::Real;
pub use samplers::{RngStream, SamplerConfig};

/// Model point with `f64` scalars.
pub type ModelPoint = analytic::ModelPoint<f64>;
/// Model point with `f32` scalars.
pub type ModelPoint32 = analytic::ModelPoint<f32>;
/// Sampled rate curve with `f64` scalars.
pub type RateCurve = analytic::RateCurve<f64>;
/// Sampled rate curve with `f32` scalars.
pub type RateCurve32 = analytic::RateCurve<f32>;
/// Grid certificate with `f64` scalars.
pub type Certificate = analytic::Certificate<f64>;
/// Grid certificate with `f32` scalars.
pub type Certificate32 = analytic::Certificate<f32>;
/// Theorem-chain certificate with `f64` scalars.
pub type TheoremCertificate = analytic::TheoremCertificate<f64>;

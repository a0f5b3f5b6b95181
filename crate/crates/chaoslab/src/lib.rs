//! Simulation and verification toolkit for Gaussian multiplicative chaos.
//!
//! The crate builds finite-cutoff approximations of chaos measures on
//! log-correlated Gaussian fields and the estimators used to check their
//! asymptotic laws:
//!
//! * [`fields`]: ⋆-scale invariant fields (multi-level, exact increments),
//!   the circle GFF, and mollified fields.
//! * [`measures`]: subcritical, derivative, Seneta–Heyde and barrier
//!   measures built from a sampled field.
//! * [`brw`]: the branching random walk with its additive and derivative
//!   martingales.
//! * [`spine`]: rooted (Girsanov tilted) samplers and the Bessel(3) spine.
//! * [`stats`]: estimators and hypothesis tests.
//! * [`cli`]: configuration and the experiment runner behind the
//!   `chaoslab` binary.
//!
//! Randomness is always drawn from a [`rng::StreamKey`], so every sample is
//! a pure function of its key and replicas can run in any order.

pub mod brw;
pub mod cli;
mod error;
pub mod fields;
pub mod measures;
pub mod quad;
pub mod rng;
pub mod spine;
pub mod stats;

pub use error::{Error, Result};

/// Critical parameter `sqrt(2d)`.
pub fn gamma_c(dim: usize) -> f64 {
    (2.0 * dim as f64).sqrt()
}

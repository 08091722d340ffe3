//! Conformal Skorokhod embedding.
//!
//! Given a law `mu` with finite variance, the map `psi(z) = sum a_n z^n` built
//! from the cosine series of `phi(theta) = G(|theta| / pi)` sends the unit disc
//! onto a planar domain whose Brownian exit abscissa, starting from `psi(0)`,
//! is distributed as `mu`. This crate computes the coefficients, traces the
//! boundary of the domain, solves for the tips of its vertical rays, turns the
//! trace into a polygon and checks the whole construction by simulation.

pub mod conformal;
pub mod distributions;
pub mod error;
pub mod fixtures;
pub mod fourier;
pub mod geometry;
pub mod montecarlo;

pub use distributions::{Distribution, DistributionSpec};
pub use error::{Error, Result};
pub use fourier::FourierSeries;

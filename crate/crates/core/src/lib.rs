//! Quantile regression at extreme and intermediate quantile levels.
//!
//! The crate provides:
//!
//! * [`qr`] — exact check-loss quantile regression at a vertex, with
//!   gradient-condition optimality certificates, batch fitting across levels,
//!   and the boundary (frontier) regression;
//! * [`tails`] — a catalogue of base tail models (types 1/2/3), the
//!   heterogeneity function `K(x)`, canonical normalization constants, and
//!   the extreme-order centering `eta(k)`;
//! * [`extreme`] — simulation of the extreme-order limit law via truncated
//!   Poisson-process realizations and the shared vertex solver;
//! * [`intermediate`] — intermediate-order normal inference: variance
//!   factors, the sandwich matrix, cross-level covariance, feasible scaling,
//!   and confidence intervals;
//! * [`tail_index`] — Pickands-type tail-index and heterogeneity estimation
//!   from regression-quantile spacings;
//! * [`harness`] — reproducible data generators, the central approximation,
//!   and the Monte Carlo QQ experiment.

pub mod dataset;
pub mod design;
pub mod error;
pub mod extreme;
pub mod harness;
pub mod intermediate;
pub mod linalg;
mod pivot;
pub mod qr;
pub mod rng;
pub mod tail_index;
pub mod tails;

pub use dataset::Dataset;
pub use design::Design;
pub use error::{Error, Result};
pub use extreme::{LimitSample, PoissonRealization};
pub use qr::QuantileFit;
pub use tails::{HeterogeneityProfile, TailModel, TailType};

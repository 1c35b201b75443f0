//! Monte Carlo harness: data generation, approximation comparison, and file
//! interchange around the estimation modules.

pub mod central;
pub mod config;
pub mod generate;
pub mod io;
pub mod qq;

pub use central::{central_approx, CentralApprox};
pub use config::{Approximation, ExperimentConfig, LimitSimConfig};
pub use generate::{GeneratorKind, GeneratorSpec, ModelSpec};
pub use qq::{empirical_quantile, run_qq_experiment, write_qq_csv, QqRow, QqTable};

//! Shared fixtures for the criterion benches.

use extremal_qr::design::Design;
use extremal_qr::harness::{GeneratorKind, GeneratorSpec, ModelSpec};
use extremal_qr::rng::replication_rng;
use extremal_qr::tails::ModelName;
use extremal_qr::Dataset;

/// Cauchy location-shift dataset with a Beta(3,3) design.
pub fn cauchy_dataset(t: usize, d: usize, seed: u64) -> Dataset {
    let spec = GeneratorSpec {
        kind: GeneratorKind::LocationShift,
        beta: vec![1.0; d],
        sigma: None,
        error_model: ModelSpec {
            name: ModelName::Cauchy,
            xi: None,
        },
        covariate_model: if d == 1 {
            Design::Intercept
        } else {
            Design::Beta33 { d }
        },
        t,
        d,
    };
    let mut rng = replication_rng(seed, 0);
    spec.generate(&mut rng).unwrap()
}

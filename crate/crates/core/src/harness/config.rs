//! Serializable experiment configurations. Unknown JSON keys are rejected.

use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{Error, Result};
use crate::tails::HeterogeneityProfile;

use super::generate::{GeneratorSpec, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approximation {
    FiniteSample,
    Extreme,
    Central,
    Intermediate,
}

fn default_approximations() -> Vec<Approximation> {
    vec![
        Approximation::FiniteSample,
        Approximation::Extreme,
        Approximation::Central,
    ]
}

fn default_grid() -> Vec<f64> {
    (1..=99).map(|p| p as f64 / 100.0).collect()
}

/// Monte Carlo QQ experiment configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub generator: GeneratorSpec,
    pub tau: f64,
    /// Implied extreme-order index `tau * T`; validated when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "R")]
    pub r: usize,
    pub seed: u64,
    #[serde(default = "default_approximations")]
    pub approximations: Vec<Approximation>,
    #[serde(default = "default_grid")]
    pub quantile_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.generator.validate()?;
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::Config(format!("tau = {} outside (0,1)", self.tau)));
        }
        if self.r == 0 {
            return Err(Error::Config("R must be at least 1".into()));
        }
        let implied = self.tau * self.generator.t as f64;
        if let Some(k) = self.k {
            if (k - implied).abs() > 1e-9 * implied.max(1.0) {
                return Err(Error::Config(format!(
                    "k = {k} inconsistent with tau*T = {implied}"
                )));
            }
        }
        if self.quantile_grid.is_empty() {
            return Err(Error::Config("quantile_grid is empty".into()));
        }
        for w in self.quantile_grid.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config("quantile_grid not strictly increasing".into()));
            }
        }
        if self
            .quantile_grid
            .iter()
            .any(|&p| !(p > 0.0 && p < 1.0))
        {
            return Err(Error::Config("quantile_grid entries must lie in (0,1)".into()));
        }
        Ok(())
    }

    pub fn k(&self) -> f64 {
        self.tau * self.generator.t as f64
    }
}

/// Configuration for the limit-law sampling command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSimConfig {
    pub model: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_vertices: Option<Vec<Vec<f64>>>,
    pub design: Design,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl LimitSimConfig {
    /// Resolve the heterogeneity profile: explicit `c` or the homogeneous
    /// one, with the design support attached.
    pub fn profile(&self) -> Result<HeterogeneityProfile> {
        let model = self.model.to_model()?;
        self.design.validate()?;
        let support = self
            .support_vertices
            .clone()
            .unwrap_or_else(|| self.design.support_probes_centered());
        match &self.c {
            Some(c) => HeterogeneityProfile::new(c.clone(), model.tail_type, Some(support)),
            None => {
                let mut p = HeterogeneityProfile::homogeneous(model.tail_type, self.design.dim());
                p.support_vertices = Some(support);
                Ok(p)
            }
        }
    }
}

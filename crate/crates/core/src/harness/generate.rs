//! Data generation for the stochastic models driving the Monte Carlo suites.
//!
//! Three generator kinds share the random-coefficient representation
//! `Y = X'beta(eps)` with `eps ~ U(0,1)`:
//!
//! * location shift: `Y = X'beta + U`, so `beta(tau) = beta + F_U^{-1}(tau) e_1`;
//! * location-scale shift: `Y = X'beta + (X'sigma) V`, requiring `X'sigma > 0`
//!   on the design support, so `beta(tau) = beta + sigma F_V^{-1}(tau)`;
//! * quantile shift: `beta(tau) = beta + beta_tail F_u^{-1}(tau) + p(tau)`
//!   with polynomial perturbations `p_j(tau) = sum_k coef[j][k] tau^{k+1}`,
//!   which lets covariates act differently on central and tail quantiles.
//!
//! Sampling uses exact inverse-CDF primitives only, so output is
//! bit-reproducible for a given stream.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::design::{open01, Design};
use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::tails::{make_model, HeterogeneityProfile, ModelName, TailModel, TailType};

/// Serializable reference to a catalogue tail model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: ModelName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
}

impl ModelSpec {
    pub fn to_model(&self) -> Result<TailModel> {
        make_model(self.name, self.xi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum GeneratorKind {
    LocationShift,
    LocationScale,
    QuantileShift {
        beta_tail: Vec<f64>,
        #[serde(default)]
        beta_poly: Vec<Vec<f64>>,
    },
}

/// Configuration of one data generating process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub beta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<f64>>,
    pub error_model: ModelSpec,
    pub covariate_model: Design,
    pub t: usize,
    pub d: usize,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        self.covariate_model.validate()?;
        let model = self.error_model.to_model()?;
        if self.covariate_model.dim() != self.d {
            return Err(Error::Generator(format!(
                "covariate model dimension {} != d = {}",
                self.covariate_model.dim(),
                self.d
            )));
        }
        if self.beta.len() != self.d {
            return Err(Error::Generator(format!(
                "beta has length {}, expected {}",
                self.beta.len(),
                self.d
            )));
        }
        if self.t < self.d {
            return Err(Error::Generator(format!(
                "T = {} below d = {}",
                self.t, self.d
            )));
        }
        match &self.kind {
            GeneratorKind::LocationShift => Ok(()),
            GeneratorKind::LocationScale => {
                let sigma = self
                    .sigma
                    .as_ref()
                    .ok_or_else(|| Error::Generator("location-scale needs sigma".into()))?;
                if sigma.len() != self.d {
                    return Err(Error::Generator("sigma dimension mismatch".into()));
                }
                if model.tail_type == TailType::Type1 {
                    return Err(Error::Generator(
                        "location-scale shift requires xi != 0".into(),
                    ));
                }
                for p in self.covariate_model.support_probes_raw() {
                    if dot(&p, sigma) <= 0.0 {
                        return Err(Error::Generator(format!(
                            "x'sigma = {} <= 0 at support point {p:?}",
                            dot(&p, sigma)
                        )));
                    }
                }
                Ok(())
            }
            GeneratorKind::QuantileShift { beta_tail, beta_poly } => {
                if beta_tail.len() != self.d {
                    return Err(Error::Generator("beta_tail dimension mismatch".into()));
                }
                if !beta_poly.is_empty() && beta_poly.len() != self.d {
                    return Err(Error::Generator("beta_poly needs one row per coefficient".into()));
                }
                if model.tail_type == TailType::Type1 {
                    return Err(Error::Generator(
                        "quantile shift requires xi != 0".into(),
                    ));
                }
                for p in self.covariate_model.support_probes_raw() {
                    if dot(&p, beta_tail) <= 0.0 {
                        return Err(Error::Generator(format!(
                            "x'beta_tail = {} <= 0 at support point {p:?}",
                            dot(&p, beta_tail)
                        )));
                    }
                    // No-crossing on a coarse grid.
                    let mut last = f64::NEG_INFINITY;
                    for i in 1..=200 {
                        let tau = i as f64 / 201.0;
                        let v = dot(&p, &self.true_beta_tau(tau));
                        if v < last - 1e-9 {
                            return Err(Error::Generator(format!(
                                "conditional quantile not monotone at x = {p:?}, tau = {tau}"
                            )));
                        }
                        last = v;
                    }
                }
                Ok(())
            }
        }
    }

    fn error_model(&self) -> TailModel {
        self.error_model.to_model().expect("validated spec")
    }

    /// True coefficient path `beta(tau)` in raw coordinates.
    pub fn true_beta_tau(&self, tau: f64) -> Vec<f64> {
        let model = self.error_model();
        let q = model.quantile(tau);
        let mut b = self.beta.clone();
        match &self.kind {
            GeneratorKind::LocationShift => {
                b[0] += q;
            }
            GeneratorKind::LocationScale => {
                let sigma = self.sigma.as_ref().expect("validated spec");
                for c in 0..self.d {
                    b[c] += sigma[c] * q;
                }
            }
            GeneratorKind::QuantileShift { beta_tail, beta_poly } => {
                for c in 0..self.d {
                    b[c] += beta_tail[c] * q;
                    if let Some(coefs) = beta_poly.get(c) {
                        let mut p = 0.0;
                        for (k, &a) in coefs.iter().enumerate() {
                            p += a * tau.powi(k as i32 + 1);
                        }
                        b[c] += p;
                    }
                }
            }
        }
        b
    }

    /// Auxiliary-line coefficients `beta_r` in raw coordinates. For finite
    /// lower endpoints this is `beta(0)`; for infinite endpoints the tail
    /// line coincides with `beta` in all three kinds.
    pub fn beta_r(&self) -> Vec<f64> {
        let model = self.error_model();
        match &self.kind {
            GeneratorKind::LocationShift => {
                let mut b = self.beta.clone();
                if model.endpoint.is_finite() {
                    b[0] += model.endpoint;
                }
                b
            }
            // X'beta_r = X'beta: the scale factor multiplies an error with
            // endpoint 0 or -inf.
            GeneratorKind::LocationScale | GeneratorKind::QuantileShift { .. } => {
                self.beta.clone()
            }
        }
    }

    /// Base quantile function `F_u^{-1}(tau) = mu_X'(beta(tau) - beta_r)`.
    pub fn base_quantile(&self, tau: f64) -> f64 {
        let mu = self.covariate_model.mean_raw();
        let bt = self.true_beta_tau(tau);
        let br = self.beta_r();
        (0..self.d).map(|c| mu[c] * (bt[c] - br[c])).sum()
    }

    /// Canonical normalization `(a_T, b_T)` of the implied base tail.
    pub fn normalization(&self, t: usize) -> Result<(f64, f64)> {
        if t < 2 {
            return Err(Error::Domain(format!("T = {t} < 2")));
        }
        let model = self.error_model();
        let q = self.base_quantile(1.0 / t as f64);
        Ok(match model.tail_type {
            TailType::Type1 => {
                // Only the location-shift kind reaches here (validated), so
                // the base tail is the error model itself.
                let a = model
                    .auxiliary(q)
                    .unwrap_or_else(|| model.auxiliary_numeric(q));
                (1.0 / a, q)
            }
            TailType::Type2 => (-1.0 / q, 0.0),
            TailType::Type3 => (1.0 / q, 0.0),
        })
    }

    /// Implied heterogeneity profile in centered coordinates. No support
    /// vertices are attached: type-2 limit constraints then bind at the
    /// sampled design points, which mirrors how the finite-sample program is
    /// restrained by its own observations (fixed hull vertices would put a
    /// common atom into the simulated law wherever the design has vanishing
    /// corner mass).
    pub fn implied_profile_centered(&self) -> Result<HeterogeneityProfile> {
        let model = self.error_model();
        let design = &self.covariate_model;
        let mu = design.mean_raw();
        let c_raw: Vec<f64> = match &self.kind {
            GeneratorKind::LocationShift => {
                return HeterogeneityProfile::new(
                    {
                        let mut c = vec![0.0; self.d];
                        if model.tail_type != TailType::Type1 {
                            c[0] = 1.0;
                        }
                        c
                    },
                    model.tail_type,
                    None,
                );
            }
            GeneratorKind::LocationScale => {
                let sigma = self.sigma.as_ref().expect("validated spec");
                let scale = dot(&mu, sigma);
                sigma.iter().map(|s| s / scale).collect()
            }
            GeneratorKind::QuantileShift { beta_tail, .. } => {
                let scale = dot(&mu, beta_tail);
                beta_tail.iter().map(|s| s / scale).collect()
            }
        };
        HeterogeneityProfile::new(design.center_coeffs(&c_raw), model.tail_type, None)
    }

    /// Draw a dataset. Deterministic given the stream.
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Dataset> {
        self.validate()?;
        let model = self.error_model();
        let mut y = Vec::with_capacity(self.t);
        let mut x = Vec::with_capacity(self.t * self.d);
        for _ in 0..self.t {
            let row = self.covariate_model.sample_raw(rng);
            let eps = open01(rng);
            let value = match &self.kind {
                GeneratorKind::LocationShift => dot(&row, &self.beta) + model.quantile(eps),
                GeneratorKind::LocationScale => {
                    let sigma = self.sigma.as_ref().expect("validated spec");
                    let s = dot(&row, sigma);
                    if s <= 0.0 {
                        return Err(Error::Generator(format!(
                            "x'sigma = {s} <= 0 at a sampled design point"
                        )));
                    }
                    dot(&row, &self.beta) + s * model.quantile(eps)
                }
                GeneratorKind::QuantileShift { .. } => dot(&row, &self.true_beta_tau(eps)),
            };
            y.push(value);
            x.extend_from_slice(&row);
        }
        Dataset::new(y, x, self.d)
    }
}

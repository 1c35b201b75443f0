//! Central (fixed-tau) normal approximation for the location-shift model:
//!
//! ```text
//!     sqrt(T) (bhat(tau) - beta(tau)) -> N(0, tau (1 - tau) / f_U(F_U^{-1}(tau))^2 (E X X')^{-1}).
//! ```

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::qr::validate_tau;

use super::generate::{GeneratorKind, GeneratorSpec};

/// Covariance and quantile table of the central approximation.
#[derive(Debug, Clone)]
pub struct CentralApprox {
    /// Asymptotic covariance of `sqrt(T)(bhat - beta(tau))`, raw coordinates.
    pub cov: Mat,
    /// True coefficients at the level.
    pub beta_tau: Vec<f64>,
    /// Per-coefficient standard deviation of `bhat_j`, i.e. `sqrt(cov_jj/T)`.
    pub sd: Vec<f64>,
    pub tau: f64,
}

impl CentralApprox {
    /// Gaussian quantile of `bhat_j(tau)` at probability `p`.
    pub fn quantile(&self, j: usize, p: f64) -> f64 {
        self.beta_tau[j] + Normal::standard().inverse_cdf(p) * self.sd[j]
    }
}

pub fn central_approx(spec: &GeneratorSpec, tau: f64) -> Result<CentralApprox> {
    validate_tau(tau)?;
    spec.validate()?;
    if !matches!(spec.kind, GeneratorKind::LocationShift) {
        return Err(Error::UnsupportedModel(
            "central approximation implemented for the location-shift kind only".into(),
        ));
    }
    let model = spec.error_model.to_model()?;
    let q = model.quantile(tau);
    let f = model.pdf(q);
    if !f.is_finite() || f <= 0.0 {
        return Err(Error::UnsupportedModel(format!(
            "error density vanishes at its tau-quantile ({q})"
        )));
    }
    let gram = spec.covariate_model.second_moment_raw();
    let cov = gram
        .inverse()?
        .scale(tau * (1.0 - tau) / (f * f))
        .symmetrize();
    let sd = (0..spec.d)
        .map(|j| (cov[(j, j)] / spec.t as f64).sqrt())
        .collect();
    Ok(CentralApprox {
        cov,
        beta_tau: spec.true_beta_tau(tau),
        sd,
        tau,
    })
}

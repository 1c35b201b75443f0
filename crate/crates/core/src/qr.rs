//! Exact finite-sample quantile regression.
//!
//! The estimator minimizes the check-loss sum
//! `sum_t rho_tau(Y_t - X_t'b)` with `rho_tau(u) = (tau - 1(u <= 0)) u`.
//! Dropping a constant, this is the hinge program
//! `-tau (sum_t X_t)'b + sum_t (X_t'b - Y_t)^+`, solved exactly at a vertex
//! `b = X(h)^{-1} Y(h)` by the crate's exterior-point pivoting core.
//! Every fit carries the finite-sample gradient-condition certificate
//! `(tau sum_t X_t - sum_t 1(Y_t < X_t'b) X_t)' X(h)^{-1}`, which lies in
//! `[0,1]^d` at an optimum and strictly inside iff the optimum is unique.
//! With exactly tied responses the interval form of the condition can be
//! inconclusive for every individual basis (the optimality multiplier has to
//! be spread across the tied rows); the solver still terminates at the exact
//! optimum and reports `unique = false` in that case.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, Lu, Mat};
use crate::pivot::{self, HingeLp, Weights, PIVOT_TOL};

/// Check loss `rho_tau(u) = (tau - 1(u <= 0)) u`.
pub fn check_loss(u: f64, tau: f64) -> Result<f64> {
    validate_tau(tau)?;
    let ind = if u <= 0.0 { 1.0 } else { 0.0 };
    Ok((tau - ind) * u)
}

pub(crate) fn validate_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Domain(format!("tau = {tau} outside (0, 1)")));
    }
    Ok(())
}

/// A fitted regression quantile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantileFit {
    pub tau: f64,
    pub beta_hat: Vec<f64>,
    /// Row indices of the optimal basis, ascending.
    pub basis: Vec<usize>,
    pub residuals: Vec<f64>,
    /// Gradient-condition value, aligned with `basis`.
    pub certificate: Vec<f64>,
    pub unique: bool,
    /// Check-loss objective at `beta_hat`.
    pub objective: f64,
}

impl QuantileFit {
    /// Fitted value at a design point.
    pub fn predict(&self, x: &[f64]) -> f64 {
        dot(x, &self.beta_hat)
    }
}

/// Solve `argmin_b sum_t rho_tau(Y_t - X_t'b)` exactly.
pub fn fit(data: &Dataset, tau: f64) -> Result<QuantileFit> {
    validate_tau(tau)?;
    let d = data.dim();
    let sums = data.xsum();
    let linear: Vec<f64> = sums.iter().map(|s| tau * s).collect();
    let lp = HingeLp {
        d,
        linear: &linear,
        xs: data.x_flat(),
        us: data.y(),
        weights: Weights::Unit,
    };
    let sol = pivot::solve(lp)?;
    let mut residuals: Vec<f64> = (0..data.len())
        .map(|t| data.y()[t] - dot(data.row(t), &sol.beta))
        .collect();
    // Basis rows are exact zeros of the vertex system.
    for &t in &sol.basis {
        residuals[t] = 0.0;
    }
    let mut objective = 0.0;
    for &r in &residuals {
        objective += check_loss(r, tau)?;
    }
    Ok(QuantileFit {
        tau,
        beta_hat: sol.beta,
        basis: sol.basis,
        residuals,
        certificate: sol.zeta,
        unique: sol.unique,
        objective,
    })
}

/// Recompute the finite-sample gradient condition for a fitted basis.
pub fn optimality_certificate(data: &Dataset, fit: &QuantileFit) -> Result<Vec<f64>> {
    let d = data.dim();
    if fit.basis.len() != d {
        return Err(Error::DegenerateBasis(format!(
            "basis has {} rows, expected {d}",
            fit.basis.len()
        )));
    }
    let mut xh = Mat::zeros(d, d);
    for (j, &t) in fit.basis.iter().enumerate() {
        for c in 0..d {
            xh[(j, c)] = data.row(t)[c];
        }
    }
    let lu = Lu::factor(&xh)?;
    let mut s = vec![0.0; d];
    let sums = data.xsum();
    for c in 0..d {
        s[c] = fit.tau * sums[c];
    }
    for t in 0..data.len() {
        if fit.basis.contains(&t) {
            continue;
        }
        let r = data.y()[t] - dot(data.row(t), &fit.beta_hat);
        if r < -PIVOT_TOL {
            for (acc, v) in s.iter_mut().zip(data.row(t)) {
                *acc -= v;
            }
        }
    }
    Ok(lu.solve_transpose(&s))
}

/// Fit a strictly ascending grid of levels. Results are identical to
/// independent `fit` calls; errors carry the offending level.
pub fn fit_process(data: &Dataset, taus: &[f64]) -> Result<Vec<QuantileFit>> {
    for w in taus.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain(format!(
                "levels not strictly ascending: {} then {}",
                w[0], w[1]
            )));
        }
    }
    taus.iter()
        .map(|&tau| {
            fit(data, tau).map_err(|e| Error::AtLevel {
                tau,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Find the fit at a given level within a fitted grid.
pub fn fit_at(fits: &[QuantileFit], tau: f64) -> Result<&QuantileFit> {
    fits.iter()
        .find(|f| (f.tau - tau).abs() <= 1e-12 * tau.max(1e-300))
        .ok_or_else(|| Error::Domain(format!("no fit at tau = {tau} in the supplied process")))
}

/// Boundary regression `max_b Xbar'b subject to Y_t >= X_t'b for all t`.
///
/// Solved as the exact-penalty hinge program
/// `-Xbar'b + 2 sum_t (X_t'b - Y_t)^+`; the dual multipliers of the
/// constrained program sum to 1 across rows, so any penalty weight above 1
/// reproduces the constrained optimum exactly.
pub fn frontier_fit(data: &Dataset) -> Result<Vec<f64>> {
    let xbar = data.xbar();
    let lp = HingeLp {
        d: data.dim(),
        linear: &xbar,
        xs: data.x_flat(),
        us: data.y(),
        weights: Weights::Uniform(2.0),
    };
    let sol = pivot::solve(lp).map_err(|e| match e {
        Error::Unbounded(_) => Error::Unbounded("frontier program is unbounded".into()),
        other => other,
    })?;
    Ok(sol.beta)
}

//! Tail inference from regression-quantile spacings.
//!
//! The ratio of spacings at geometrically related levels,
//!
//! ```text
//!     rho(x, xdot, l) = x'(bhat(m l tau) - bhat(l tau)) / xdot'(bhat(m tau) - bhat(tau)),
//! ```
//!
//! converges to `l^{-xi} H(x)/H(xdot)`, which yields a Pickands-type tail
//! index estimator `xi_rp = -ln rho(Xbar, Xbar, l) / ln l` and, at `l = 1`, a
//! consistent estimate of the heterogeneity index `x'c`. For `l = m = 2` the
//! estimator is asymptotically normal:
//!
//! ```text
//!     sqrt(tau T) (xi_rp - xi) -> N(0, pi * xi^2 (2^{2 xi + 1} + 1) / (2 (2^xi - 1) ln 2)^2),
//! ```
//!
//! with `pi = mu_X' Q_H^{-1} Q_X Q_H^{-1} mu_X` (1 in the homogeneous case).

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::intermediate::sample_q_h;
use crate::linalg::dot;
use crate::qr::{self, QuantileFit};

const LN2: f64 = std::f64::consts::LN_2;

fn spacing(fits: &[QuantileFit], x: &[f64], low: f64, high: f64) -> Result<f64> {
    let a = qr::fit_at(fits, low)?;
    let b = qr::fit_at(fits, high)?;
    Ok((0..x.len())
        .map(|c| x[c] * (b.beta_hat[c] - a.beta_hat[c]))
        .sum())
}

/// Spacing ratio `rho(x, xdot, l)` from a process fitted at
/// `{tau, m tau, l tau, m l tau}`.
pub fn spacing_ratio(
    fits: &[QuantileFit],
    tau: f64,
    l: f64,
    m: f64,
    x: &[f64],
    xdot: &[f64],
) -> Result<f64> {
    if l <= 0.0 || m <= 1.0 {
        return Err(Error::Domain(format!("need l > 0 and m > 1, got ({l}, {m})")));
    }
    let num = spacing(fits, x, l * tau, m * l * tau)?;
    let den = spacing(fits, xdot, tau, m * tau)?;
    if den == 0.0 {
        return Err(Error::SpacingDegenerate(format!(
            "denominator spacing is zero at levels ({tau}, {})",
            m * tau
        )));
    }
    Ok(num / den)
}

/// Pickands-type tail index `-ln rho(Xbar, Xbar, l) / ln l`.
pub fn pickands_xi(
    fits: &[QuantileFit],
    xbar: &[f64],
    tau: f64,
    l: f64,
    m: f64,
) -> Result<f64> {
    if l == 1.0 {
        return Err(Error::Domain("l must differ from 1".into()));
    }
    let rho = spacing_ratio(fits, tau, l, m, xbar, xbar)?;
    if rho <= 0.0 {
        let d1 = spacing(fits, xbar, l * tau, m * l * tau)?;
        let d0 = spacing(fits, xbar, tau, m * tau)?;
        return Err(Error::RegimeFailure(format!(
            "nonpositive spacing ratio {rho} (numerator {d1}, denominator {d0}); \
             quantile crossing at tau T = {:.1}",
            tau * fits_len_hint(fits)
        )));
    }
    Ok(-rho.ln() / l.ln())
}

fn fits_len_hint(fits: &[QuantileFit]) -> f64 {
    fits.first().map_or(f64::NAN, |f| f.residuals.len() as f64)
}

/// Heterogeneity estimate `rho(x, Xbar, 1) -> x'c` (for `xi != 0`).
pub fn heterogeneity_estimate(
    fits: &[QuantileFit],
    xbar: &[f64],
    tau: f64,
    m: f64,
    x: &[f64],
) -> Result<f64> {
    spacing_ratio(fits, tau, 1.0, m, x, xbar)
}

/// Asymptotic variance of the Pickands estimator at `l = m = 2`, continuously
/// extended at `xi = 0`.
pub fn pickands_variance(xi: f64, pi: f64) -> Result<f64> {
    if pi <= 0.0 {
        return Err(Error::Domain(format!("pi = {pi} must be positive")));
    }
    if xi.abs() < 1e-12 {
        // xi^2/(2^xi - 1)^2 -> 1/ln^2(2), and 2^{2 xi + 1} + 1 -> 3.
        return Ok(pi * 3.0 / (4.0 * LN2.powi(4)));
    }
    let num = xi * xi * (2f64.powf(2.0 * xi + 1.0) + 1.0);
    let den = (2.0 * (2f64.powf(xi) - 1.0) * LN2).powi(2);
    Ok(pi * num / den)
}

/// Population limit of the spacing ratio `x'(b(l tau) - b(tau)) / x'(b(m tau) - b(tau))`,
/// used as a finite-tau bias diagnostic.
pub fn spacing_ratio_limit(l: f64, m: f64, xi: f64) -> Result<f64> {
    if l <= 0.0 || m <= 0.0 {
        return Err(Error::Domain("l and m must be positive".into()));
    }
    if m == 1.0 {
        return Err(Error::Domain("m = 1 degenerates the limit ratio".into()));
    }
    Ok(if xi == 0.0 {
        l.ln() / m.ln()
    } else if xi < 0.0 {
        (l.powf(-xi) - 1.0) / (m.powf(-xi) - 1.0)
    } else {
        (1.0 - l.powf(-xi)) / (1.0 - m.powf(-xi))
    })
}

/// Point estimate bundle from one spacing grid.
#[derive(Debug, Clone)]
pub struct SpacingEstimates {
    pub tau: f64,
    pub l: f64,
    pub m: f64,
    pub rho_hat: f64,
    pub xi_hat: f64,
    /// Implied heterogeneity vector: `x'c` is estimated by `x . c_hat_vector`.
    pub c_hat_vector: Vec<f64>,
    pub se_xi: f64,
    pub pi_hat: f64,
}

/// Serializable tail report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailReport {
    pub xi_hat: f64,
    pub se_xi: f64,
    pub ci: [f64; 2],
    pub l: f64,
    pub m: f64,
    pub tau: f64,
    pub pi_hat: f64,
    pub c_hat: Vec<CHatPoint>,
    #[serde(skip)]
    pub c_hat_vector: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CHatPoint {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Default tail-estimation level: `tau T = T^{0.7}`.
pub fn default_tail_tau(t: usize) -> f64 {
    (t as f64).powf(0.7) / t as f64
}

/// Spacings-based point estimates of the tail quantities. `tau = None`
/// selects the default bandwidth.
pub fn spacing_estimates(
    data: &Dataset,
    tau: Option<f64>,
    l: f64,
    m: f64,
) -> Result<SpacingEstimates> {
    let t = data.len();
    let tau = tau.unwrap_or_else(|| default_tail_tau(t));
    qr::validate_tau(tau)?;
    if m * l * tau >= 1.0 {
        return Err(Error::Domain(format!(
            "m*l*tau = {} reaches beyond the unit interval",
            m * l * tau
        )));
    }
    let mut levels = vec![tau, l * tau, m * tau, m * l * tau];
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.max(1e-300));
    let fits = qr::fit_process(data, &levels)?;
    let xbar = data.xbar();

    let rho_hat = spacing_ratio(&fits, tau, l, m, &xbar, &xbar)?;
    let xi_hat = pickands_xi(&fits, &xbar, tau, l, m)?;

    // c_hat as a vector: rho(x, Xbar, 1) = x'(bhat(m tau) - bhat(tau)) /
    // Xbar'(bhat(m tau) - bhat(tau)) is linear in x.
    let base = spacing(&fits, &xbar, tau, m * tau)?;
    if base == 0.0 {
        return Err(Error::SpacingDegenerate(
            "base spacing at (tau, m tau) is zero".into(),
        ));
    }
    let low = qr::fit_at(&fits, tau)?;
    let high = qr::fit_at(&fits, m * tau)?;
    let c_hat_vector: Vec<f64> = (0..data.dim())
        .map(|c| (high.beta_hat[c] - low.beta_hat[c]) / base)
        .collect();

    // pi plug-in through the sandwich moments with H(x) = x'c_hat.
    let q_x = data.gram();
    let q_h = if xi_hat.abs() < 1e-8 {
        q_x.clone()
    } else {
        sample_q_h(data, |x| dot(x, &c_hat_vector))?
    };
    let qh_inv = q_h.inverse()?;
    let middle = qh_inv.matmul(&q_x).matmul(&qh_inv);
    let pi_hat = dot(&middle.matvec(&xbar), &xbar);
    if pi_hat <= 0.0 {
        return Err(Error::Moment(format!("pi plug-in {pi_hat} not positive")));
    }

    let se_xi = (pickands_variance(xi_hat, pi_hat)? / (tau * t as f64)).sqrt();
    Ok(SpacingEstimates {
        tau,
        l,
        m,
        rho_hat,
        xi_hat,
        c_hat_vector,
        se_xi,
        pi_hat,
    })
}

/// Full tail analysis of a dataset; `probe_points` are the design points at
/// which the heterogeneity estimate is reported.
pub fn tail_report(
    data: &Dataset,
    tau: Option<f64>,
    l: f64,
    m: f64,
    probe_points: &[Vec<f64>],
) -> Result<TailReport> {
    let est = spacing_estimates(data, tau, l, m)?;
    let z95 = 1.959963984540054;
    let c_hat = probe_points
        .iter()
        .map(|x| CHatPoint {
            x: x.clone(),
            value: dot(x, &est.c_hat_vector),
        })
        .collect();
    Ok(TailReport {
        xi_hat: est.xi_hat,
        se_xi: est.se_xi,
        ci: [est.xi_hat - z95 * est.se_xi, est.xi_hat + z95 * est.se_xi],
        l: est.l,
        m: est.m,
        tau: est.tau,
        pi_hat: est.pi_hat,
        c_hat,
        c_hat_vector: est.c_hat_vector,
    })
}

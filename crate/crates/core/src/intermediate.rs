//! Intermediate-order inference: scaling constants, the sandwich variance,
//! cross-level covariance, and confidence intervals.
//!
//! In the regime `tau -> 0`, `tau T -> inf`, the scaled estimation error
//! `a_T (bhat(tau) - b(tau))` with `a_T = sqrt(tau T) / mu_X'(b(m tau) - b(tau))`
//! is asymptotically `N(0, Omega_0)` where
//!
//! ```text
//!     Omega_0 = Q_H^{-1} Q_X Q_H^{-1} * xi^2 / (m^{-xi} - 1)^2,
//!     Q_X = E X X',   Q_H = E [H(X)]^{-1} X X',
//!     H(x) = x'c (types 2/3),  H(x) = 1 (type 1),
//! ```
//!
//! with the variance factor read as `(ln m)^{-2}` at `xi = 0`. Across levels
//! `l_i tau`, the covariance scales by `min(l_i, l_j)/sqrt(l_i l_j)`. The
//! infeasible scaling can be replaced by
//! `sqrt(tau l T) / Xbar'(bhat(m l tau) - bhat(l tau))`.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};
use crate::qr::{self, QuantileFit};
use crate::tail_index;
use crate::tails::{HeterogeneityProfile, TailModel, TailType};

/// Floor on `tau * min(l) * T` below which the normal regime is unreliable.
pub const TAU_T_FLOOR: f64 = 30.0;

/// Parameters of an intermediate-order analysis.
#[derive(Debug, Clone)]
pub struct IntermediateSpec {
    pub tau: f64,
    pub t: usize,
    pub m: f64,
    pub levels_l: Vec<f64>,
}

impl IntermediateSpec {
    pub fn new(tau: f64, t: usize, m: f64, levels_l: Vec<f64>) -> Result<Self> {
        qr::validate_tau(tau)?;
        if m <= 1.0 {
            return Err(Error::Domain(format!("m = {m} must exceed 1")));
        }
        if levels_l.iter().any(|&l| l <= 0.0) {
            return Err(Error::Domain("all level multipliers must be positive".into()));
        }
        Ok(IntermediateSpec { tau, t, m, levels_l })
    }

    /// Regime warnings (the floor is advisory, not an error).
    pub fn warnings(&self) -> Vec<String> {
        let lmin = self.levels_l.iter().cloned().fold(1.0_f64, f64::min);
        let eff = self.tau * lmin * self.t as f64;
        if eff < TAU_T_FLOOR {
            vec![format!(
                "tau*l*T = {eff:.1} below the floor {TAU_T_FLOOR}; the normal regime may be unreliable"
            )]
        } else {
            Vec::new()
        }
    }
}

/// `xi^2 / (m^{-xi} - 1)^2`, continuously extended to `(ln m)^{-2}` at zero.
pub fn variance_factor(xi: f64, m: f64) -> Result<f64> {
    if m <= 1.0 {
        return Err(Error::Domain(format!("m = {m} must exceed 1")));
    }
    if xi == 0.0 {
        let lm = m.ln();
        return Ok(1.0 / (lm * lm));
    }
    let den = m.powf(-xi) - 1.0;
    Ok(xi * xi / (den * den))
}

/// Sandwich variance of the intermediate-order limit.
#[derive(Debug, Clone)]
pub struct VarianceModel {
    pub q_x: Mat,
    pub q_h: Mat,
    pub xi: f64,
    pub m: f64,
    pub omega0: Mat,
}

/// Assemble `Omega_0` from design moments.
pub fn omega0(q_x: Mat, q_h: Mat, xi: f64, m: f64) -> Result<VarianceModel> {
    if !q_x.is_positive_definite() {
        return Err(Error::Moment("Q_X is not positive definite".into()));
    }
    if !q_h.is_positive_definite() {
        return Err(Error::Moment("Q_H is not positive definite".into()));
    }
    let factor = variance_factor(xi, m)?;
    let qh_inv = q_h.inverse()?;
    let omega = qh_inv.matmul(&q_x).matmul(&qh_inv).scale(factor).symmetrize();
    Ok(VarianceModel {
        q_x,
        q_h,
        xi,
        m,
        omega0: omega,
    })
}

/// Sample moment `T^{-1} sum_t X_t X_t' / H(X_t)`.
pub fn sample_q_h(data: &Dataset, h: impl Fn(&[f64]) -> f64) -> Result<Mat> {
    let d = data.dim();
    let mut g = Mat::zeros(d, d);
    for t in 0..data.len() {
        let row = data.row(t);
        let ht = h(row);
        if ht <= 0.0 || !ht.is_finite() {
            return Err(Error::Moment(format!(
                "H(x) = {ht} not positive at row {t}"
            )));
        }
        for i in 0..d {
            for j in 0..d {
                g[(i, j)] += row[i] * row[j] / ht;
            }
        }
    }
    Ok(g.scale(1.0 / data.len() as f64))
}

/// Cross-level covariance factor `min(l_i, l_j)/sqrt(l_i l_j)`.
pub fn cross_cov_factor(l_i: f64, l_j: f64) -> Result<f64> {
    if l_i <= 0.0 || l_j <= 0.0 {
        return Err(Error::Domain(format!(
            "level multipliers must be positive, got ({l_i}, {l_j})"
        )));
    }
    Ok(l_i.min(l_j) / (l_i * l_j).sqrt())
}

/// Feasible scaling `sqrt(tau l T) / Xbar'(bhat(m l tau) - bhat(l tau))`.
pub fn feasible_scaling(
    fits: &[QuantileFit],
    xbar: &[f64],
    tau: f64,
    l: f64,
    m: f64,
    t: usize,
) -> Result<f64> {
    let low = qr::fit_at(fits, l * tau)?;
    let high = qr::fit_at(fits, m * l * tau)?;
    let spacing: f64 = (0..xbar.len())
        .map(|c| xbar[c] * (high.beta_hat[c] - low.beta_hat[c]))
        .sum();
    if spacing <= 0.0 {
        return Err(Error::SpacingDegenerate(format!(
            "Xbar spacing {spacing} at levels ({}, {})",
            l * tau,
            m * l * tau
        )));
    }
    Ok((tau * l * t as f64).sqrt() / spacing)
}

/// How the tail quantities entering a confidence interval are obtained.
pub enum CiMode<'a> {
    /// True tail index and heterogeneity profile supplied.
    Oracle {
        model: &'a TailModel,
        profile: &'a HeterogeneityProfile,
    },
    /// Everything estimated from the sample via regression-quantile spacings.
    Feasible,
}

#[derive(Debug, Clone)]
pub struct CiRow {
    pub coef: usize,
    pub level: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
pub struct CiTable {
    pub rows: Vec<CiRow>,
    pub a_t: f64,
    pub mode: String,
    pub warnings: Vec<String>,
}

/// Per-coefficient intervals `bhat_j(tau) +- z sqrt(Omega_{0,jj}) / a_T`.
pub fn intermediate_ci(
    data: &Dataset,
    tau: f64,
    m: f64,
    coverage: f64,
    mode: CiMode<'_>,
) -> Result<CiTable> {
    if !(0.0..1.0).contains(&coverage) {
        return Err(Error::Domain(format!(
            "coverage = {coverage} outside [0, 1)"
        )));
    }
    let spec = IntermediateSpec::new(tau, data.len(), m, vec![1.0])?;
    let warnings = spec.warnings();
    let t = data.len();
    let fit = qr::fit(data, tau)?;
    let xbar = data.xbar();

    let (a_t, vm, label) = match mode {
        CiMode::Oracle { model, profile } => {
            let denom = model.quantile(m * tau) - model.quantile(tau);
            if denom <= 0.0 {
                return Err(Error::SpacingDegenerate(format!(
                    "oracle quantile spacing {denom}"
                )));
            }
            let a_t = (tau * t as f64).sqrt() / denom;
            let q_x = data.gram();
            let q_h = match profile.tail_type {
                TailType::Type1 => q_x.clone(),
                _ => sample_q_h(data, |x| dot(x, &profile.c))?,
            };
            (a_t, omega0(q_x, q_h, model.xi, m)?, "oracle")
        }
        CiMode::Feasible => {
            let fits = qr::fit_process(data, &sorted_levels(&[tau, m * tau]))?;
            let a_t = feasible_scaling(&fits, &xbar, tau, 1.0, m, t)?;
            // Tail quantities from a separate spacing grid at tau' with
            // tau' T = T^0.7, the default bandwidth for tail estimation.
            let report = tail_index::tail_report(data, None, 2.0, 2.0, std::slice::from_ref(&xbar))?;
            let q_x = data.gram();
            let q_h = if report.xi_hat.abs() < 1e-8 {
                q_x.clone()
            } else {
                sample_q_h(data, |x| dot(x, &report.c_hat_vector))?
            };
            (a_t, omega0(q_x, q_h, report.xi_hat, m)?, "feasible")
        }
    };

    let z = if coverage == 0.0 {
        0.0
    } else {
        Normal::standard().inverse_cdf(0.5 * (1.0 + coverage))
    };
    let rows = (0..data.dim())
        .map(|j| {
            let half = z * vm.omega0[(j, j)].max(0.0).sqrt() / a_t;
            CiRow {
                coef: j,
                level: coverage,
                estimate: fit.beta_hat[j],
                lower: fit.beta_hat[j] - half,
                upper: fit.beta_hat[j] + half,
            }
        })
        .collect();
    Ok(CiTable {
        rows,
        a_t,
        mode: label.to_string(),
        warnings,
    })
}

fn sorted_levels(levels: &[f64]) -> Vec<f64> {
    let mut v = levels.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.max(1e-300));
    v
}

/// CSV export of a CI table.
pub fn write_ci_csv<W: std::io::Write>(w: W, table: &CiTable) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["coefficient", "level", "estimate", "lower", "upper", "a_t", "mode"])?;
    for r in &table.rows {
        wtr.write_record(&[
            r.coef.to_string(),
            format!("{}", r.level),
            format!("{}", r.estimate),
            format!("{}", r.lower),
            format!("{}", r.upper),
            format!("{}", table.a_t),
            table.mode.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

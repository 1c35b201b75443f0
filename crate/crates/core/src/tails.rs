//! Tail-model catalogue and heterogeneity structure.
//!
//! A `TailModel` is a base distribution `F_u` in the domain of minimum
//! attraction, classified by its extreme value index:
//!
//! * type 1 (`xi = 0`): `F_u(z + v a(z)) ~ F_u(z) e^v`, with auxiliary
//!   function `a(z) = int_{s_u}^z F_u(v) dv / F_u(z)`;
//! * type 2 (`xi > 0`): `F_u(vz) ~ v^{-1/xi} F_u(z)` as `z -> -inf`;
//! * type 3 (`xi < 0`): `F_u(vz) ~ v^{-1/xi} F_u(z)` as `z -> 0+`.
//!
//! A `HeterogeneityProfile` carries the index vector `c` that links the
//! conditional tail at a design point to the base tail through
//! `K(x) = e^{-x'c}` (type 1) or `K(x) = (x'c)^{1/xi}` (types 2 and 3),
//! normalized so `K(mu_X) = 1`. All formulas below assume the centered design
//! convention `mu_X = (1, 0, ..., 0)'`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailType {
    Type1,
    Type2,
    Type3,
}

/// Catalogue names accepted by [`make_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    /// `U = -E`, `E` unit exponential: `F(z) = e^z` on `(-inf, 0]`, type 1.
    ReflectedExponential,
    /// Standard Cauchy lower tail: type 2 with `xi = 1`.
    Cauchy,
    /// `F(z) = (-z)^{-1/xi}` for `z <= -1`: type 2, parametric in `xi > 0`.
    ParetoMin,
    /// Uniform on `[0, 1]`: type 3 with `xi = -1`.
    Uniform,
    /// Closed-form family selected by the sign of `xi`.
    CustomXi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    ReflectedExp,
    Cauchy,
    ParetoMin { xi: f64 },
    PowerUniform { xi: f64 },
}

/// A base tail distribution with exact closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct TailModel {
    kind: Kind,
    pub tail_type: TailType,
    pub xi: f64,
    /// Lower endpoint `s_u` (0 or -inf).
    pub endpoint: f64,
}

/// Build a catalogue model. `xi`, when given, must be consistent with the
/// model family's sign convention.
pub fn make_model(name: ModelName, xi: Option<f64>) -> Result<TailModel> {
    let model = match name {
        ModelName::ReflectedExponential => {
            check_xi(xi, 0.0)?;
            TailModel {
                kind: Kind::ReflectedExp,
                tail_type: TailType::Type1,
                xi: 0.0,
                endpoint: f64::NEG_INFINITY,
            }
        }
        ModelName::Cauchy => {
            check_xi(xi, 1.0)?;
            TailModel {
                kind: Kind::Cauchy,
                tail_type: TailType::Type2,
                xi: 1.0,
                endpoint: f64::NEG_INFINITY,
            }
        }
        ModelName::ParetoMin => {
            let xi = xi.unwrap_or(1.0);
            if xi <= 0.0 {
                return Err(Error::Domain(format!("ParetoMin needs xi > 0, got {xi}")));
            }
            TailModel {
                kind: Kind::ParetoMin { xi },
                tail_type: TailType::Type2,
                xi,
                endpoint: f64::NEG_INFINITY,
            }
        }
        ModelName::Uniform => {
            check_xi(xi, -1.0)?;
            TailModel {
                kind: Kind::PowerUniform { xi: -1.0 },
                tail_type: TailType::Type3,
                xi: -1.0,
                endpoint: 0.0,
            }
        }
        ModelName::CustomXi => {
            let xi = xi.ok_or_else(|| Error::Domain("CustomXi requires xi".into()))?;
            if xi > 0.0 {
                TailModel {
                    kind: Kind::ParetoMin { xi },
                    tail_type: TailType::Type2,
                    xi,
                    endpoint: f64::NEG_INFINITY,
                }
            } else if xi < 0.0 {
                TailModel {
                    kind: Kind::PowerUniform { xi },
                    tail_type: TailType::Type3,
                    xi,
                    endpoint: 0.0,
                }
            } else {
                TailModel {
                    kind: Kind::ReflectedExp,
                    tail_type: TailType::Type1,
                    xi: 0.0,
                    endpoint: f64::NEG_INFINITY,
                }
            }
        }
    };
    Ok(model)
}

fn check_xi(xi: Option<f64>, expected: f64) -> Result<()> {
    if let Some(v) = xi {
        if (v - expected).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "model has fixed xi = {expected}, got {v}"
            )));
        }
    }
    Ok(())
}

impl TailModel {
    /// Left-continuous inverse `F_u^{-1}(tau)` for `tau` in (0, 1).
    pub fn quantile(&self, tau: f64) -> f64 {
        assert!(tau > 0.0 && tau < 1.0, "quantile level outside (0,1)");
        match self.kind {
            Kind::ReflectedExp => tau.ln(),
            Kind::Cauchy => (std::f64::consts::PI * (tau - 0.5)).tan(),
            Kind::ParetoMin { xi } => -tau.powf(-xi),
            Kind::PowerUniform { xi } => tau.powf(-xi),
        }
    }

    /// Distribution function.
    pub fn cdf(&self, z: f64) -> f64 {
        match self.kind {
            Kind::ReflectedExp => {
                if z >= 0.0 {
                    1.0
                } else {
                    z.exp()
                }
            }
            Kind::Cauchy => 0.5 + z.atan() / std::f64::consts::PI,
            Kind::ParetoMin { xi } => {
                if z >= -1.0 {
                    1.0
                } else {
                    (-z).powf(-1.0 / xi)
                }
            }
            Kind::PowerUniform { xi } => {
                if z <= 0.0 {
                    0.0
                } else if z >= 1.0 {
                    1.0
                } else {
                    z.powf(-1.0 / xi)
                }
            }
        }
    }

    /// Density, zero outside the support.
    pub fn pdf(&self, z: f64) -> f64 {
        match self.kind {
            Kind::ReflectedExp => {
                if z >= 0.0 {
                    0.0
                } else {
                    z.exp()
                }
            }
            Kind::Cauchy => 1.0 / (std::f64::consts::PI * (1.0 + z * z)),
            Kind::ParetoMin { xi } => {
                if z >= -1.0 {
                    0.0
                } else {
                    (1.0 / xi) * (-z).powf(-1.0 / xi - 1.0)
                }
            }
            Kind::PowerUniform { xi } => {
                if z <= 0.0 || z >= 1.0 {
                    0.0
                } else {
                    (-1.0 / xi) * z.powf(-1.0 / xi - 1.0)
                }
            }
        }
    }

    /// Auxiliary function `a(z)`; `Some` only for type 1 models.
    pub fn auxiliary(&self, _z: f64) -> Option<f64> {
        match self.kind {
            Kind::ReflectedExp => Some(1.0),
            _ => None,
        }
    }

    /// Numeric `a(z) = int_{s_u}^z F(v) dv / F(z)` by adaptive Simpson
    /// quadrature (relative tolerance 1e-8). Closed forms take precedence;
    /// this is the fallback for custom type-1 distribution functions.
    pub fn auxiliary_numeric(&self, z: f64) -> f64 {
        // Truncate the improper lower end where F is negligible.
        let lo = if self.endpoint.is_finite() {
            self.endpoint
        } else {
            self.quantile(1e-14).min(z - 1.0)
        };
        let integral = adaptive_simpson(&|v| self.cdf(v), lo, z, 1e-8 * self.cdf(z).max(1e-300));
        integral / self.cdf(z)
    }

    /// Deviation from the defining tail-equivalence relation at level `tau`:
    /// types 2/3 compare `F(v F^{-1}(tau))/tau` with `v^{-1/xi}`; type 1
    /// compares `F(F^{-1}(tau) + v a(F^{-1}(tau)))/tau` with `e^v`.
    pub fn tail_equivalence_gap(&self, v: f64, tau: f64) -> f64 {
        let q = self.quantile(tau);
        match self.tail_type {
            TailType::Type1 => {
                let a = self.auxiliary(q).unwrap_or_else(|| self.auxiliary_numeric(q));
                (self.cdf(q + v * a) / tau - v.exp()).abs()
            }
            TailType::Type2 | TailType::Type3 => {
                (self.cdf(v * q) / tau - v.powf(-1.0 / self.xi)).abs()
            }
        }
    }
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// Canonical normalization constants `(a_T, b_T)`:
/// type 1 `(1/a(F^{-1}(1/T)), F^{-1}(1/T))`, type 2 `(-1/F^{-1}(1/T), 0)`,
/// type 3 `(1/F^{-1}(1/T), 0)`.
pub fn normalization_constants(model: &TailModel, t: usize) -> Result<(f64, f64)> {
    if t < 2 {
        return Err(Error::Domain(format!("T = {t} < 2")));
    }
    let q = model.quantile(1.0 / t as f64);
    Ok(match model.tail_type {
        TailType::Type1 => {
            let a = model
                .auxiliary(q)
                .unwrap_or_else(|| model.auxiliary_numeric(q));
            (1.0 / a, q)
        }
        TailType::Type2 => (-1.0 / q, 0.0),
        TailType::Type3 => (1.0 / q, 0.0),
    })
}

/// Heterogeneity index `c` with the tail type it applies to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityProfile {
    pub c: Vec<f64>,
    pub tail_type: TailType,
    /// Points spanning the design support, used for no-crossing and
    /// constraint checks. Optional; samplers provide fallbacks.
    pub support_vertices: Option<Vec<Vec<f64>>>,
}

impl HeterogeneityProfile {
    pub fn new(
        c: Vec<f64>,
        tail_type: TailType,
        support_vertices: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::Domain("empty heterogeneity index".into()));
        }
        // mu_X = e_1 under the centering convention, so mu_X'c = c_1.
        match tail_type {
            TailType::Type1 => {
                if c[0].abs() > 1e-9 {
                    return Err(Error::Domain(format!(
                        "type 1 requires mu_X'c = 0, got {}",
                        c[0]
                    )));
                }
            }
            TailType::Type2 | TailType::Type3 => {
                if (c[0] - 1.0).abs() > 1e-9 {
                    return Err(Error::Domain(format!(
                        "types 2/3 require mu_X'c = 1, got {}",
                        c[0]
                    )));
                }
            }
        }
        if let Some(verts) = &support_vertices {
            for v in verts {
                if v.len() != c.len() {
                    return Err(Error::Domain("support vertex dimension mismatch".into()));
                }
                if tail_type != TailType::Type1 && dot(v, &c) <= 0.0 {
                    return Err(Error::CrossingViolation(format!(
                        "x'c = {} <= 0 at support vertex {v:?}",
                        dot(v, &c)
                    )));
                }
            }
        }
        Ok(HeterogeneityProfile {
            c,
            tail_type,
            support_vertices,
        })
    }

    /// Homogeneous profile: `c = 0` for type 1, `c = e_1` for types 2/3.
    pub fn homogeneous(tail_type: TailType, d: usize) -> Self {
        let mut c = vec![0.0; d];
        if tail_type != TailType::Type1 {
            c[0] = 1.0;
        }
        HeterogeneityProfile {
            c,
            tail_type,
            support_vertices: None,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.tail_type {
            TailType::Type1 => self.c.iter().all(|&v| v == 0.0),
            _ => {
                self.c[0] == 1.0 && self.c[1..].iter().all(|&v| v == 0.0)
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }
}

/// Heterogeneity function `K(x)`.
pub fn k_function(x: &[f64], profile: &HeterogeneityProfile, xi: f64) -> Result<f64> {
    let xc = dot(x, &profile.c);
    match profile.tail_type {
        TailType::Type1 => Ok((-xc).exp()),
        TailType::Type2 | TailType::Type3 => {
            if xc <= 0.0 {
                return Err(Error::CrossingViolation(format!(
                    "x'c = {xc} <= 0 under type 2/3 tails"
                )));
            }
            Ok(xc.powf(1.0 / xi))
        }
    }
}

/// Centering vector `eta(k)`: `c + ln(k) e_1` (type 1), `-k^{-xi} c` (type 2),
/// `k^{-xi} c` (type 3).
pub fn eta(k: f64, profile: &HeterogeneityProfile, xi: f64) -> Vec<f64> {
    eta_parts(k, profile.tail_type, &profile.c, xi)
}

pub(crate) fn eta_parts(k: f64, tail_type: TailType, c: &[f64], xi: f64) -> Vec<f64> {
    assert!(k > 0.0, "k must be positive");
    match tail_type {
        TailType::Type1 => {
            let mut out = c.to_vec();
            out[0] += k.ln();
            out
        }
        TailType::Type2 => c.iter().map(|&ci| -k.powf(-xi) * ci).collect(),
        TailType::Type3 => c.iter().map(|&ci| k.powf(-xi) * ci).collect(),
    }
}

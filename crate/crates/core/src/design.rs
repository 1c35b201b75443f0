//! Covariate designs and exact sampling primitives.
//!
//! Limit-law formulas assume the centered convention `mu_X = (1, 0, ..., 0)'`;
//! datasets are generated in raw coordinates and the affine maps below move
//! coefficients between the two systems.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Unit exponential via inversion.
#[inline]
pub fn exp_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -open01(rng).ln()
}

/// Standard Cauchy via `tan(pi (u - 1/2))`.
#[inline]
pub fn cauchy<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    (std::f64::consts::PI * (open01(rng) - 0.5)).tan()
}

/// Beta(3, 3) as `G1 / (G1 + G2)` with each `G ~ Gamma(3)` a sum of three
/// unit exponentials.
#[inline]
pub fn beta33<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let g1 = exp_unit(rng) + exp_unit(rng) + exp_unit(rng);
    let g2 = exp_unit(rng) + exp_unit(rng) + exp_unit(rng);
    g1 / (g1 + g2)
}

/// Covariate model for `X = (1, X_{-1}')'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Design {
    /// No covariates: `X = 1`.
    Intercept,
    /// `X_{-1}` i.i.d. Beta(3, 3), `d - 1` coordinates.
    Beta33 { d: usize },
    /// `X_{-1}` i.i.d. Uniform(0, 1).
    UniformCube { d: usize },
    /// Equal-probability draws from a fixed list of raw design points
    /// (leading coordinate 1).
    Discrete { points: Vec<Vec<f64>> },
}

impl Design {
    pub fn dim(&self) -> usize {
        match self {
            Design::Intercept => 1,
            Design::Beta33 { d } | Design::UniformCube { d } => *d,
            Design::Discrete { points } => points.first().map_or(0, |p| p.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Design::Intercept => Ok(()),
            Design::Beta33 { d } | Design::UniformCube { d } => {
                if *d == 0 {
                    Err(Error::Config("design dimension must be positive".into()))
                } else {
                    Ok(())
                }
            }
            Design::Discrete { points } => {
                if points.is_empty() {
                    return Err(Error::Config("discrete design needs points".into()));
                }
                let d = points[0].len();
                for p in points {
                    if p.len() != d {
                        return Err(Error::Config("discrete design points ragged".into()));
                    }
                    if p[0] != 1.0 {
                        return Err(Error::Config(
                            "discrete design points need leading 1".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    /// Population mean `mu_X` in raw coordinates.
    pub fn mean_raw(&self) -> Vec<f64> {
        match self {
            Design::Intercept => vec![1.0],
            Design::Beta33 { d } | Design::UniformCube { d } => {
                let mut m = vec![0.5; *d];
                m[0] = 1.0;
                m
            }
            Design::Discrete { points } => {
                let d = self.dim();
                let mut m = vec![0.0; d];
                for p in points {
                    for c in 0..d {
                        m[c] += p[c];
                    }
                }
                for v in &mut m {
                    *v /= points.len() as f64;
                }
                m
            }
        }
    }

    /// Population second moment `E X X'` in raw coordinates (exact).
    pub fn second_moment_raw(&self) -> Mat {
        let d = self.dim();
        let mut g = Mat::zeros(d, d);
        match self {
            Design::Intercept => {
                g[(0, 0)] = 1.0;
            }
            Design::Beta33 { .. } | Design::UniformCube { .. } => {
                // Coordinates independent with mean 1/2; E X^2 is 2/7 for
                // Beta(3,3) (variance 1/28) and 1/3 for Uniform.
                let ex2 = if matches!(self, Design::Beta33 { .. }) {
                    2.0 / 7.0
                } else {
                    1.0 / 3.0
                };
                for i in 0..d {
                    for j in 0..d {
                        g[(i, j)] = match (i, j) {
                            (0, 0) => 1.0,
                            (0, _) | (_, 0) => 0.5,
                            _ if i == j => ex2,
                            _ => 0.25,
                        };
                    }
                }
            }
            Design::Discrete { points } => {
                for p in points {
                    for i in 0..d {
                        for j in 0..d {
                            g[(i, j)] += p[i] * p[j];
                        }
                    }
                }
                g = g.scale(1.0 / points.len() as f64);
            }
        }
        g
    }

    pub fn sample_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Design::Intercept => vec![1.0],
            Design::Beta33 { d } => {
                let mut x = Vec::with_capacity(*d);
                x.push(1.0);
                for _ in 1..*d {
                    x.push(beta33(rng));
                }
                x
            }
            Design::UniformCube { d } => {
                let mut x = Vec::with_capacity(*d);
                x.push(1.0);
                for _ in 1..*d {
                    x.push(open01(rng));
                }
                x
            }
            Design::Discrete { points } => {
                let i = rng.random_range(0..points.len());
                points[i].clone()
            }
        }
    }

    /// Centered coordinates of a raw point: `(1, x_{-1} - mu_{-1})`.
    pub fn center_point(&self, raw: &[f64]) -> Vec<f64> {
        let mu = self.mean_raw();
        let mut out = raw.to_vec();
        for c in 1..raw.len() {
            out[c] -= mu[c];
        }
        out
    }

    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let raw = self.sample_raw(rng);
        self.center_point(&raw)
    }

    /// Coefficient map raw -> centered: fitted values are invariant, so
    /// `x'b = x_c'b_c` with `b_c = (b_1 + mu_{-1}'b_{-1}, b_{-1})`.
    pub fn center_coeffs(&self, beta_raw: &[f64]) -> Vec<f64> {
        let mu = self.mean_raw();
        let mut out = beta_raw.to_vec();
        for c in 1..beta_raw.len() {
            out[0] += mu[c] * beta_raw[c];
        }
        out
    }

    /// Inverse of [`Design::center_coeffs`].
    pub fn uncenter_coeffs(&self, beta_centered: &[f64]) -> Vec<f64> {
        let mu = self.mean_raw();
        let mut out = beta_centered.to_vec();
        for c in 1..beta_centered.len() {
            out[0] -= mu[c] * beta_centered[c];
        }
        out
    }

    /// Points spanning the support in raw coordinates.
    pub fn support_probes_raw(&self) -> Vec<Vec<f64>> {
        match self {
            Design::Intercept => vec![vec![1.0]],
            Design::Beta33 { d } | Design::UniformCube { d } => {
                let k = d - 1;
                assert!(k <= 16, "corner enumeration for d - 1 <= 16");
                let mut out = Vec::with_capacity(1 << k);
                for mask in 0..(1usize << k) {
                    let mut p = Vec::with_capacity(*d);
                    p.push(1.0);
                    for b in 0..k {
                        p.push(if mask >> b & 1 == 1 { 1.0 } else { 0.0 });
                    }
                    out.push(p);
                }
                out
            }
            Design::Discrete { points } => points.clone(),
        }
    }

    /// Points spanning the support, in centered coordinates: hypercube
    /// corners for the continuous designs, the point list for discrete ones.
    pub fn support_probes_centered(&self) -> Vec<Vec<f64>> {
        match self {
            Design::Intercept => vec![vec![1.0]],
            Design::Beta33 { d } | Design::UniformCube { d } => {
                let k = d - 1;
                assert!(k <= 16, "corner enumeration for d - 1 <= 16");
                let mut out = Vec::with_capacity(1 << k);
                for mask in 0..(1usize << k) {
                    let mut p = Vec::with_capacity(*d);
                    p.push(1.0);
                    for b in 0..k {
                        p.push(if mask >> b & 1 == 1 { 0.5 } else { -0.5 });
                    }
                    out.push(p);
                }
                out
            }
            Design::Discrete { points } => {
                points.iter().map(|p| self.center_point(p)).collect()
            }
        }
    }
}

//! Regression sample container.

use crate::error::{Error, Result};
use crate::linalg::Mat;

/// A sample `{Y_t, X_t}` with a leading intercept column.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: Vec<f64>,
    x: Vec<f64>, // row-major T x d
    t: usize,
    d: usize,
}

impl Dataset {
    /// Build from a response vector and row-major design data (including the
    /// intercept column). Checks the structural invariants: first column all
    /// ones, `T >= d`, and full column rank.
    pub fn new(y: Vec<f64>, x: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Design("dimension d must be positive".into()));
        }
        if x.len() != y.len() * d {
            return Err(Error::Design(format!(
                "design has {} entries, expected {} x {}",
                x.len(),
                y.len(),
                d
            )));
        }
        let t = y.len();
        if t < d {
            return Err(Error::Design(format!("T = {t} < d = {d}")));
        }
        if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Design("nonfinite entries".into()));
        }
        for row in 0..t {
            if x[row * d] != 1.0 {
                return Err(Error::Design(format!(
                    "row {row} has first column {} (must be 1)",
                    x[row * d]
                )));
            }
        }
        let ds = Dataset { y, x, t, d };
        // X'X positive definite <=> full column rank.
        if !ds.gram().is_positive_definite() {
            return Err(Error::Design("design matrix is rank deficient".into()));
        }
        Ok(ds)
    }

    pub fn from_rows(y: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Design("ragged design rows".into()));
        }
        let mut x = Vec::with_capacity(rows.len() * d);
        for r in rows {
            x.extend_from_slice(r);
        }
        Dataset::new(y, x, d)
    }

    pub fn len(&self) -> usize {
        self.t
    }

    pub fn is_empty(&self) -> bool {
        self.t == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_flat(&self) -> &[f64] {
        &self.x
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.x[t * self.d..(t + 1) * self.d]
    }

    /// Column means of the design, `X bar`.
    pub fn xbar(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for t in 0..self.t {
            let row = self.row(t);
            for c in 0..self.d {
                m[c] += row[c];
            }
        }
        for c in &mut m {
            *c /= self.t as f64;
        }
        m
    }

    /// Column sums of the design.
    pub fn xsum(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.d];
        for t in 0..self.t {
            let row = self.row(t);
            for c in 0..self.d {
                m[c] += row[c];
            }
        }
        m
    }

    /// Sample second moment matrix `T^{-1} sum_t X_t X_t'`.
    pub fn gram(&self) -> Mat {
        let d = self.d;
        let mut g = Mat::zeros(d, d);
        for t in 0..self.t {
            let row = self.row(t);
            for i in 0..d {
                for j in 0..d {
                    g[(i, j)] += row[i] * row[j];
                }
            }
        }
        g.scale(1.0 / self.t as f64)
    }
}

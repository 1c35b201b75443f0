//! Shared oracles for the integration suites: brute-force vertex enumeration,
//! KS distances, and small-sample instance generators. Everything here is
//! independent of the solver paths it checks.

#![allow(dead_code)]

use extremal_qr::dataset::Dataset;
use extremal_qr::linalg::{dot, Lu, Mat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// All d-element subsets of 0..n.
pub fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, d, cur, out);
            cur.pop();
        }
    }
    rec(0, n, d, &mut cur, &mut out);
    out
}

fn basis_solution(data: &Dataset, h: &[usize]) -> Option<Vec<f64>> {
    let d = data.dim();
    let mut xh = Mat::zeros(d, d);
    let mut yh = vec![0.0; d];
    for (j, &t) in h.iter().enumerate() {
        for c in 0..d {
            xh[(j, c)] = data.row(t)[c];
        }
        yh[j] = data.y()[t];
    }
    Lu::factor(&xh).ok().map(|lu| lu.solve(&yh))
}

pub fn check_objective(data: &Dataset, beta: &[f64], tau: f64) -> f64 {
    let mut obj = 0.0;
    for t in 0..data.len() {
        let u = data.y()[t] - dot(data.row(t), beta);
        let ind = if u <= 0.0 { 1.0 } else { 0.0 };
        obj += (tau - ind) * u;
    }
    obj
}

/// Minimum of the check loss over every d-row basis vertex.
pub fn brute_force_qr_objective(data: &Dataset, tau: f64) -> f64 {
    let mut best = f64::INFINITY;
    for h in combinations(data.len(), data.dim()) {
        if let Some(beta) = basis_solution(data, &h) {
            let obj = check_objective(data, &beta, tau);
            if obj < best {
                best = obj;
            }
        }
    }
    best
}

/// Frontier oracle: the best feasible basis vertex for
/// `max Xbar'b s.t. Y >= X b`.
pub fn brute_force_frontier(data: &Dataset) -> Option<Vec<f64>> {
    let xbar = data.xbar();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for h in combinations(data.len(), data.dim()) {
        if let Some(beta) = basis_solution(data, &h) {
            let feasible = (0..data.len())
                .all(|t| data.y()[t] - dot(data.row(t), &beta) >= -1e-9);
            if feasible {
                let v = dot(&xbar, &beta);
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, beta));
                }
            }
        }
    }
    best.map(|(_, b)| b)
}

/// Kolmogorov-Smirnov distance between a sorted sample and a CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut ks = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        ks = ks.max(((i + 1) as f64 / n - f).abs());
        ks = ks.max((f - i as f64 / n).abs());
    }
    ks
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sd(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let ma = mean(a);
    let mb = mean(b);
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() - 1) as f64
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    covariance(a, b) / (sd(a) * sd(b))
}

/// Random full-rank instance with continuous data; first column ones.
pub fn random_instance(rng: &mut ChaCha8Rng, t: usize, d: usize) -> Dataset {
    loop {
        let mut y = Vec::with_capacity(t);
        let mut rows = Vec::with_capacity(t);
        for _ in 0..t {
            let mut row = vec![1.0];
            for _ in 1..d {
                row.push(rng.random_range(-1.0..1.0));
            }
            rows.push(row);
            // Mildly heavy-tailed response keeps vertex geometry generic.
            let u: f64 = rng.random_range(-0.499..0.499);
            y.push((std::f64::consts::PI * u).tan() * 0.5 + rng.random_range(-1.0..1.0));
        }
        if let Ok(ds) = Dataset::from_rows(y, &rows) {
            return ds;
        }
    }
}

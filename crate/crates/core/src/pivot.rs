//! Exterior-point pivoting for piecewise-linear programs of the form
//!
//! ```text
//!     minimize  -w'b + sum_t  c_t * (x_t'b - u_t)^+        over b in R^d
//! ```
//!
//! where each row weight `c_t` is a positive number or `+inf`. A row with
//! infinite weight acts as the hard constraint `x_t'b <= u_t`. This family
//! covers the finite-sample check-loss fit (`w = tau * sum_t x_t`, unit
//! weights), the extreme-order limit problem (`w = k * e_1`, unit weights,
//! infinite-weight rows for the type-2 support constraints) and the frontier
//! program (all weights finite and > 1, which is an exact penalty because the
//! dual multipliers are bounded by 1).
//!
//! The solver walks vertices `b_h = X(h)^{-1} u(h)` indexed by d-row bases h.
//! At a vertex, the optimality certificate is
//!
//! ```text
//!     zeta(h) = (w - sum_{t: u_t < x_t'b} c_t x_t)' X(h)^{-1},
//! ```
//!
//! and the vertex is optimal iff `0 <= zeta_j <= c_{h_j}` for every basis
//! position j (the directional derivatives along the two edge directions that
//! relax basis row j are `zeta_j` and `c_{h_j} - zeta_j`). A violated
//! component selects the descent edge; the step runs through residual
//! breakpoints accumulating the convex derivative until it turns nonnegative,
//! so each pivot passes many breakpoints at once. Violations are scanned in
//! ascending basis-row order and breakpoint ties resolve to the smallest row
//! index, a Bland-style rule for the degenerate case.

use crate::error::{Error, Result};
use crate::linalg::{dot, Lu, Mat};

/// Zero / pivot tolerance (residual classification, certificate tests).
pub const PIVOT_TOL: f64 = 1e-9;
/// Certificate containment tolerance.
pub const CERT_TOL: f64 = 1e-8;

/// Row weights for [`HingeLp`].
#[derive(Debug, Clone, Copy)]
pub enum Weights<'a> {
    /// Every row has weight 1.
    Unit,
    /// Every row has the same finite weight.
    Uniform(f64),
    /// Per-row weights; `f64::INFINITY` marks a hard constraint row.
    PerRow(&'a [f64]),
}

impl Weights<'_> {
    #[inline]
    fn get(&self, t: usize) -> f64 {
        match self {
            Weights::Unit => 1.0,
            Weights::Uniform(w) => *w,
            Weights::PerRow(w) => w[t],
        }
    }
}

/// Problem data. `xs` is row-major `n x d`.
#[derive(Debug, Clone, Copy)]
pub struct HingeLp<'a> {
    pub d: usize,
    pub linear: &'a [f64],
    pub xs: &'a [f64],
    pub us: &'a [f64],
    pub weights: Weights<'a>,
}

#[derive(Debug, Clone)]
pub struct HingeSolution {
    pub beta: Vec<f64>,
    /// Basis row indices, ascending.
    pub basis: Vec<usize>,
    /// Certificate aligned with `basis`.
    pub zeta: Vec<f64>,
    /// Strict interior certificate (unique argmin).
    pub unique: bool,
    #[allow(dead_code)]
    pub iterations: usize,
}

impl<'a> HingeLp<'a> {
    fn n(&self) -> usize {
        self.us.len()
    }

    #[inline]
    fn row(&self, t: usize) -> &[f64] {
        &self.xs[t * self.d..(t + 1) * self.d]
    }
}

struct State<'a> {
    p: HingeLp<'a>,
    basis: Vec<usize>,
    lu: Lu,
    beta: Vec<f64>,
    margins: Vec<f64>,
    zeta: Vec<f64>,
}

impl<'a> State<'a> {
    fn refresh(&mut self) -> Result<()> {
        let d = self.p.d;
        let mut xh = Mat::zeros(d, d);
        let mut uh = vec![0.0; d];
        for (j, &t) in self.basis.iter().enumerate() {
            let row = self.p.row(t);
            for c in 0..d {
                xh[(j, c)] = row[c];
            }
            uh[j] = self.p.us[t];
        }
        self.lu = Lu::factor(&xh)?;
        self.beta = self.lu.solve(&uh);
        for t in 0..self.p.n() {
            self.margins[t] = dot(self.p.row(t), &self.beta) - self.p.us[t];
        }
        for &t in &self.basis {
            self.margins[t] = 0.0;
        }
        // zeta' = s' X(h)^{-1}  <=>  X(h)' zeta = s
        let mut s = self.p.linear.to_vec();
        for t in 0..self.p.n() {
            if self.margins[t] > PIVOT_TOL {
                let w = self.p.weights.get(t);
                let row = self.p.row(t);
                for c in 0..d {
                    s[c] -= w * row[c];
                }
            }
        }
        self.zeta = self.lu.solve_transpose(&s);
        Ok(())
    }

    /// Non-basis rows sitting exactly on their hinge at the current vertex.
    fn zero_rows(&self) -> Vec<usize> {
        (0..self.p.n())
            .filter(|&t| self.margins[t].abs() <= PIVOT_TOL && !self.basis.contains(&t))
            .collect()
    }

    /// True if every certificate component lies within its bounds.
    fn certified(&self) -> bool {
        self.basis.iter().enumerate().all(|(j, &t)| {
            let cap = self.p.weights.get(t);
            self.zeta[j] >= -PIVOT_TOL && self.zeta[j] <= cap + PIVOT_TOL
        })
    }

    /// Edge direction that relaxes basis position `j`; `upward` selects the
    /// side on which the basis row's own hinge activates.
    fn edge_direction(&self, j: usize, upward: bool) -> Vec<f64> {
        let d = self.p.d;
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let mut dir = self.lu.solve(&e);
        if !upward {
            for v in &mut dir {
                *v = -*v;
            }
        }
        dir
    }

    /// One-sided derivative along an edge, including the immediate
    /// activations of other rows sitting on their hinge at this vertex.
    /// Without that term the certificate interval test is valid only at
    /// nondegenerate vertices.
    fn edge_derivative(&self, j: usize, upward: bool, dir: &[f64], zeros: &[usize]) -> f64 {
        let cap = self.p.weights.get(self.basis[j]);
        let base = if upward {
            cap - self.zeta[j]
        } else {
            self.zeta[j]
        };
        let mut d0 = base;
        for &r in zeros {
            let v = dot(self.p.row(r), dir);
            if v > 0.0 {
                d0 += self.p.weights.get(r) * v;
            }
        }
        d0
    }

    /// First basis edge with a strictly negative true derivative, scanned in
    /// basis order (certificate violations only, so the nondegenerate fast
    /// path computes no extra directions).
    fn descent_edge(&self, zeros: &[usize]) -> Option<(usize, bool, f64, Vec<f64>)> {
        for (j, &t) in self.basis.iter().enumerate() {
            let cap = self.p.weights.get(t);
            for (upward, violated) in [
                (false, self.zeta[j] < -PIVOT_TOL),
                (true, self.zeta[j] > cap + PIVOT_TOL),
            ] {
                if !violated {
                    continue;
                }
                let dir = self.edge_direction(j, upward);
                let d0 = self.edge_derivative(j, upward, &dir, zeros);
                if d0 < -PIVOT_TOL {
                    return Some((j, upward, d0, dir));
                }
            }
        }
        None
    }

    /// Walk the strict breakpoints along `dir` starting from the true
    /// one-sided derivative `d0`. Zero rows are excluded: their jumps are
    /// already part of `d0`, so every returned step is strictly positive and
    /// each pivot strictly decreases the objective. Returns the entering row,
    /// or None if the ray is unbounded.
    fn line_search(&self, j: usize, dir: &[f64], d0: f64) -> Option<usize> {
        let leaving = self.basis[j];
        let mut hits: Vec<(f64, usize, f64)> = Vec::new();
        for t in 0..self.p.n() {
            if t == leaving || self.basis.contains(&t) {
                continue;
            }
            let m = self.margins[t];
            if m.abs() <= PIVOT_TOL {
                continue;
            }
            let v = dot(self.p.row(t), dir);
            if v.abs() <= 1e-12 {
                continue;
            }
            // Activation (inactive row, moving up through its hinge) and
            // deactivation (active row, moving down to zero) both raise the
            // directional derivative by weight * |v|.
            let crossing = if m > 0.0 { v < 0.0 } else { v > 0.0 };
            if !crossing {
                continue;
            }
            hits.push((-m / v, t, self.p.weights.get(t) * v.abs()));
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut deriv = d0;
        for (_, t, jump) in hits {
            deriv += jump;
            if deriv >= 0.0 {
                return Some(t);
            }
        }
        None
    }
}

fn greedy_basis(p: &HingeLp, order: &[usize]) -> Result<Vec<usize>> {
    let d = p.d;
    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    for &t in order {
        if chosen.len() == d {
            break;
        }
        let cand = p.row(t);
        // Gram-Schmidt residual against the chosen rows.
        let mut resid = cand.to_vec();
        for r in &rows {
            let proj = dot(&resid, r) / dot(r, r);
            for c in 0..d {
                resid[c] -= proj * r[c];
            }
        }
        let scale = cand.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
        if dot(&resid, &resid).sqrt() > 1e-10 * scale {
            chosen.push(t);
            rows.push(resid);
        }
    }
    if chosen.len() < d {
        return Err(Error::Design(format!(
            "rows span only {} of {} dimensions",
            chosen.len(),
            d
        )));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

pub fn solve(p: HingeLp) -> Result<HingeSolution> {
    let n = p.n();
    let d = p.d;
    assert_eq!(p.linear.len(), d);
    assert_eq!(p.xs.len(), n * d);
    if n < d {
        return Err(Error::Design(format!("{n} rows for dimension {d}")));
    }

    let order: Vec<usize> = (0..n).collect();
    let basis = greedy_basis(&p, &order)?;

    let mut st = State {
        p,
        basis,
        lu: Lu::factor(&Mat::identity(d))?,
        beta: vec![0.0; d],
        margins: vec![0.0; n],
        zeta: vec![0.0; d],
    };
    st.refresh()?;

    // The start must satisfy every hard row.
    for t in 0..n {
        if st.p.weights.get(t).is_infinite() && st.margins[t] > PIVOT_TOL {
            return Err(Error::InfeasibleConstraints(format!(
                "hard row {t} violated at the starting vertex (margin {:.3e})",
                st.margins[t]
            )));
        }
    }

    let max_iter = 200 + 50 * (n + d);
    let mut iterations = 0;
    loop {
        // Strict descent: every pivot passes at least one positive
        // breakpoint, so the objective strictly decreases and no cycling is
        // possible.
        loop {
            let zeros = st.zero_rows();
            let Some((j, _upward, d0, dir)) = st.descent_edge(&zeros) else {
                break;
            };
            if iterations >= max_iter {
                return Err(Error::Numerical(format!(
                    "pivoting did not terminate within {max_iter} iterations"
                )));
            }
            let entering = match st.line_search(j, &dir, d0) {
                Some(t) => t,
                None => {
                    return Err(Error::Unbounded(
                        "objective decreases without bound along a feasible ray".into(),
                    ))
                }
            };
            st.basis[j] = entering;
            st.basis.sort_unstable();
            st.refresh()?;
            iterations += 1;
        }
        // At a tied (degenerate) vertex the single-basis certificate can be
        // inconclusive even though no basis edge descends; walk the bases of
        // this vertex looking for either a certificate or a descent edge.
        if !st.certified() {
            match explore_degenerate_bases(&mut st, &mut iterations)? {
                Exploration::Descent => continue,
                Exploration::Certified | Exploration::Exhausted => {}
            }
        }
        if !canonicalize_step(&mut st, &mut iterations)? {
            break;
        }
    }

    let unique = st.certified()
        && st.basis.iter().enumerate().all(|(j, &t)| {
            let cap = st.p.weights.get(t);
            st.zeta[j] > CERT_TOL && (cap.is_infinite() || st.zeta[j] < cap - CERT_TOL)
        });

    Ok(HingeSolution {
        beta: st.beta.clone(),
        basis: st.basis.clone(),
        zeta: st.zeta.clone(),
        unique,
        iterations,
    })
}

enum Exploration {
    /// Found a basis of the same vertex whose certificate is in bounds.
    Certified,
    /// Found a basis with a strictly descending edge; the state points at it.
    Descent,
    /// All bases of the vertex were visited and none descends: the vertex is
    /// optimal (every incident edge of the criterion ascends), but no single
    /// basis certifies it through the gradient-condition interval.
    Exhausted,
}

/// Breadth-first walk over the bases of the current (degenerate) vertex,
/// swapping zero rows in and out. Deterministic: neighbors are generated in
/// ascending (position, row) order.
fn explore_degenerate_bases(st: &mut State, iterations: &mut usize) -> Result<Exploration> {
    use std::collections::{HashSet, VecDeque};
    let origin = st.basis.clone();
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    visited.insert(origin.clone());
    queue.push_back(origin);
    let mut best_seen: Option<Vec<usize>> = None;
    while let Some(basis) = queue.pop_front() {
        if visited.len() > 10_000 {
            return Err(Error::Numerical(
                "degenerate vertex exploration exceeded its budget".into(),
            ));
        }
        st.basis = basis.clone();
        st.refresh()?;
        *iterations += 1;
        if st.certified() {
            return Ok(Exploration::Certified);
        }
        let zeros = st.zero_rows();
        if st.descent_edge(&zeros).is_some() {
            return Ok(Exploration::Descent);
        }
        if best_seen.as_ref().is_none_or(|b| &basis < b) {
            best_seen = Some(basis.clone());
        }
        for j in 0..st.p.d {
            let dir = st.edge_direction(j, true);
            for &r in &zeros {
                if dot(st.p.row(r), &dir).abs() <= 1e-10 {
                    continue; // swap would be singular
                }
                let mut cand = basis.clone();
                cand[j] = r;
                cand.sort_unstable();
                if visited.insert(cand.clone()) {
                    queue.push_back(cand);
                }
            }
        }
    }
    // Leave the state at the lexicographically smallest basis seen.
    if let Some(best) = best_seen {
        st.basis = best;
        st.refresh()?;
    }
    Ok(Exploration::Exhausted)
}

/// Under non-uniqueness, drift along zero-derivative edges while doing so
/// makes the sorted basis lexicographically smaller. Performs at most one
/// accepted move; deterministic, and the overall walk terminates because the
/// basis key strictly decreases on every accepted move.
fn canonicalize_step(st: &mut State, iterations: &mut usize) -> Result<bool> {
    let zeros = st.zero_rows();
    for j in 0..st.basis.len() {
        let t = st.basis[j];
        let cap = st.p.weights.get(t);
        let flat_low = st.zeta[j].abs() <= CERT_TOL;
        let flat_high = cap.is_finite() && (cap - st.zeta[j]).abs() <= CERT_TOL;
        for upward in [false, true] {
            if (upward && !flat_high) || (!upward && !flat_low) {
                continue;
            }
            let dir = st.edge_direction(j, upward);
            // Only a direction that is flat to first order qualifies; rows
            // sitting on their hinge can make a boundary certificate ascend.
            if st.edge_derivative(j, upward, &dir, &zeros) > CERT_TOL {
                continue;
            }
            let entering = match st.line_search(j, &dir, 0.0) {
                Some(t) => t,
                None => continue,
            };
            let mut cand = st.basis.clone();
            cand[j] = entering;
            cand.sort_unstable();
            if cand < st.basis {
                st.basis = cand;
                st.refresh()?;
                *iterations += 1;
                return Ok(true);
            }
        }
    }
    Ok(false)
}

//! Dense two-phase tableau simplex for small linear programs.
//!
//! Solves `min c·z` subject to `A_eq z = b_eq`, `A_le z ≤ b_le` and `z ≥ 0`
//! except for variables marked free. Pivoting uses Dantzig's rule and falls
//! back to Bland's rule for the rest of a phase once a run of degenerate
//! pivots is observed, so the pivot sequence is a deterministic function of
//! the input and the method terminates.
//!
//! Every optimal solution carries dual multipliers so callers can check a
//! primal/dual optimality certificate with [`LpSolution::certificate_violation`].

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-7;
const DEGENERATE_RUN: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `min c·z` subject to equality, `≤` and sign constraints.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    objective: Vec<f64>,
    eq_rows: Vec<Vec<f64>>,
    eq_rhs: Vec<f64>,
    le_rows: Vec<Vec<f64>>,
    le_rhs: Vec<f64>,
    free: Vec<bool>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            free: vec![false; n],
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.eq_rows.len() + self.le_rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn eq_rows(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.eq_rows, &self.eq_rhs)
    }

    pub fn le_rows(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.le_rows, &self.le_rhs)
    }

    pub fn is_free(&self, j: usize) -> bool {
        self.free[j]
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.le_rows.push(row);
        self.le_rhs.push(rhs);
    }

    /// `row·z ≥ rhs`, stored as `-row·z ≤ -rhs`.
    pub fn add_ge(&mut self, row: Vec<f64>, rhs: f64) {
        self.add_le(row.into_iter().map(|v| -v).collect(), -rhs);
    }

    fn dense(&self, terms: &[(usize, f64)]) -> Vec<f64> {
        let mut row = vec![0.0; self.num_vars()];
        for &(j, a) in terms {
            row[j] += a;
        }
        row
    }

    pub fn add_eq_sparse(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let row = self.dense(terms);
        self.add_eq(row, rhs);
    }

    pub fn add_le_sparse(&mut self, terms: &[(usize, f64)], rhs: f64) {
        let row = self.dense(terms);
        self.add_le(row, rhs);
    }

    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::Dimension("linear program without variables".into()));
        }
        let rows = self.eq_rows.iter().chain(&self.le_rows);
        let rhs = self.eq_rhs.iter().chain(&self.le_rhs);
        for (r, &b) in rows.zip(rhs) {
            if r.len() != n {
                return Err(Error::Dimension(format!(
                    "constraint row of length {} for {n} variables",
                    r.len()
                )));
            }
            if !b.is_finite() || r.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument("non-finite constraint data".into()));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite objective".into()));
        }
        if n > 20_000 || self.num_constraints() > 20_000 {
            return Err(Error::TooLarge(format!(
                "{n} variables and {} constraints",
                self.num_constraints()
            )));
        }
        Ok(())
    }

    /// Objective value at `z`.
    pub fn evaluate(&self, z: &[f64]) -> f64 {
        dot(&self.objective, z)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point (meaningful only when optimal).
    pub z: Vec<f64>,
    pub objective_value: f64,
    /// Multipliers of the equality rows.
    pub duals_eq: Vec<f64>,
    /// Multipliers of the `≤` rows (nonpositive at optimality).
    pub duals_le: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Largest violation among primal feasibility, dual feasibility and the
    /// duality gap, scaled by the magnitude of the data involved.
    pub fn certificate_violation(&self, lp: &LinearProgram) -> f64 {
        let mut worst: f64 = 0.0;
        let scale = |row: &[f64], b: f64| 1.0 + row.iter().fold(b.abs(), |m, v| m.max(v.abs()));
        for (row, &b) in lp.eq_rows.iter().zip(&lp.eq_rhs) {
            worst = worst.max((dot(row, &self.z) - b).abs() / scale(row, b));
        }
        for (row, &b) in lp.le_rows.iter().zip(&lp.le_rhs) {
            worst = worst.max((dot(row, &self.z) - b).max(0.0) / scale(row, b));
        }
        for (j, &zj) in self.z.iter().enumerate() {
            if !lp.free[j] {
                worst = worst.max(-zj);
            }
        }
        for &y in &self.duals_le {
            worst = worst.max(y);
        }
        let cscale = 1.0 + lp.objective.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..lp.num_vars() {
            let mut r = lp.objective[j];
            for (row, y) in lp.eq_rows.iter().zip(&self.duals_eq) {
                r -= row[j] * y;
            }
            for (row, y) in lp.le_rows.iter().zip(&self.duals_le) {
                r -= row[j] * y;
            }
            let v = if lp.free[j] { r.abs() } else { -r };
            worst = worst.max(v / cscale);
        }
        let dual_value = dot(&lp.eq_rhs, &self.duals_eq) + dot(&lp.le_rhs, &self.duals_le);
        worst.max((self.objective_value - dual_value).abs() / (1.0 + self.objective_value.abs()))
    }
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    /// Reduced costs, last entry is minus the objective value.
    d: Vec<f64>,
    basis: Vec<usize>,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.cols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let piv = self.t[r * w + c];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[c] = 1.0;
        }
        let (before, rest) = self.t.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for other in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = other[c];
            if f != 0.0 {
                for (v, p) in other.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                other[c] = 0.0;
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for (v, p) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            self.d[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.cols + 1;
        self.d[..self.cols].copy_from_slice(costs);
        self.d[self.cols] = 0.0;
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                for (v, t) in self.d.iter_mut().zip(&self.t[i * w..(i + 1) * w]) {
                    *v -= cb * t;
                }
            }
        }
    }

    /// Smallest ratio, ties to the lowest basic index.
    fn bland_ratio(&self, c: usize) -> Option<(usize, f64)> {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_EPS {
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie {
                            Some((i, ratio))
                        } else if tie && self.basis[i] < self.basis[r] {
                            Some((i, ratio.min(best)))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
        }
        leave
    }

    /// Two-pass ratio test: bound the step with rows relaxed by
    /// [`FEAS_TOL`], then take the largest pivot among rows within it.
    fn harris_ratio(&self, c: usize) -> Option<(usize, f64)> {
        let mut bound = f64::INFINITY;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_EPS {
                bound = bound.min((self.rhs(i).max(0.0) + FEAS_TOL) / a);
            }
        }
        if bound.is_infinite() {
            return None;
        }
        let mut leave: Option<(usize, f64, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_EPS {
                let ratio = self.rhs(i).max(0.0) / a;
                if ratio <= bound && leave.is_none_or(|(_, _, best)| a > best) {
                    leave = Some((i, ratio, a));
                }
            }
        }
        leave.map(|(i, ratio, _)| (i, ratio))
    }

    /// Runs simplex iterations over columns `< allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize, limit: usize) -> Result<bool> {
        let mut degenerate_run = 0;
        let mut bland = false;
        loop {
            if self.pivots > limit {
                return Err(Error::IterationLimit(self.pivots));
            }
            let entering = if bland {
                (0..allowed).find(|&j| self.d[j] < -COST_EPS)
            } else {
                let mut best = None;
                let mut best_val = -COST_EPS;
                for j in 0..allowed {
                    if self.d[j] < best_val {
                        best_val = self.d[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let leave = if bland {
                self.bland_ratio(c)
            } else {
                self.harris_ratio(c)
            };
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }
}

/// Largest constraint violation at `z`, relative to the row magnitude.
fn primal_residual(lp: &LinearProgram, z: &[f64]) -> f64 {
    let scale = |row: &[f64], b: f64| 1.0 + row.iter().fold(b.abs(), |m, v| m.max(v.abs()));
    let eq = lp
        .eq_rows
        .iter()
        .zip(&lp.eq_rhs)
        .map(|(row, &b)| (dot(row, z) - b).abs() / scale(row, b));
    let le = lp
        .le_rows
        .iter()
        .zip(&lp.le_rhs)
        .map(|(row, &b)| (dot(row, z) - b).max(0.0) / scale(row, b));
    eq.chain(le).fold(0.0, f64::max)
}

/// Solves a linear program. Infeasibility and unboundedness are reported
/// through [`LpSolution::status`]; malformed input is an error.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let n_eq = lp.eq_rows.len();
    let n_le = lp.le_rows.len();
    let m = n_eq + n_le;

    // structural columns: one per variable, plus a negative part for free ones
    let mut neg_col = vec![usize::MAX; n];
    let mut n_struct = n;
    for (col, &free) in neg_col.iter_mut().zip(&lp.free) {
        if free {
            *col = n_struct;
            n_struct += 1;
        }
    }
    let first_slack = n_struct;
    let first_art = first_slack + n_le;
    let cols = first_art + m;

    if m == 0 {
        // unconstrained apart from signs
        let mut z = vec![0.0; n];
        for j in 0..n {
            let c = lp.objective[j];
            if c < 0.0 || (lp.free[j] && c != 0.0) {
                return Ok(LpSolution {
                    status: LpStatus::Unbounded,
                    z,
                    objective_value: f64::NEG_INFINITY,
                    duals_eq: vec![],
                    duals_le: vec![],
                });
            }
            z[j] = 0.0;
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            z,
            objective_value: 0.0,
            duals_eq: vec![],
            duals_le: vec![],
        });
    }

    let w = cols + 1;
    let mut t = vec![0.0; m * w];
    let mut sign = vec![1.0; m];
    let rows = lp.eq_rows.iter().chain(&lp.le_rows);
    let rhs = lp.eq_rhs.iter().chain(&lp.le_rhs);
    for (i, (row, &b)) in rows.zip(rhs).enumerate() {
        let line = &mut t[i * w..(i + 1) * w];
        for j in 0..n {
            line[j] = row[j];
            if lp.free[j] {
                line[neg_col[j]] = -row[j];
            }
        }
        if i >= n_eq {
            line[first_slack + (i - n_eq)] = 1.0;
        }
        line[cols] = b;
        if b < 0.0 {
            sign[i] = -1.0;
            for v in line.iter_mut() {
                *v = -*v;
            }
        }
        line[first_art + i] = 1.0;
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        t,
        d: vec![0.0; w],
        basis: (first_art..first_art + m).collect(),
        first_artificial: first_art,
        pivots: 0,
    };
    let limit = 50_000 + 20 * (m + cols);

    // phase 1: minimize the sum of artificials
    let mut phase1 = vec![0.0; cols];
    for c in phase1.iter_mut().skip(first_art) {
        *c = 1.0;
    }
    tab.set_costs(&phase1);
    tab.optimize(cols, limit)?;
    let bscale = 1.0
        + lp.eq_rhs
            .iter()
            .chain(&lp.le_rhs)
            .fold(0.0f64, |a, v| a.max(v.abs()));
    let infeasibility = -tab.d[cols];
    if infeasibility < -1e-9 * bscale {
        return Err(Error::Numerical(format!(
            "phase 1 objective {infeasibility:e} is negative"
        )));
    }
    if infeasibility > 1e-9 * bscale {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            z: vec![0.0; n],
            objective_value: f64::NAN,
            duals_eq: vec![0.0; n_eq],
            duals_le: vec![0.0; n_le],
        });
    }

    // drive remaining artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= tab.first_artificial {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..first_art {
                let a = tab.at(i, j).abs();
                if a > 1e-9 && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                tab.pivot(i, j);
            }
        }
    }

    // phase 2
    let mut costs = vec![0.0; cols];
    for j in 0..n {
        costs[j] = lp.objective[j];
        if lp.free[j] {
            costs[neg_col[j]] = -lp.objective[j];
        }
    }
    tab.set_costs(&costs);
    let bounded = tab.optimize(first_art, limit)?;

    let mut values = vec![0.0; cols];
    for i in 0..m {
        values[tab.basis[i]] = tab.rhs(i);
    }
    let z: Vec<f64> = (0..n)
        .map(|j| {
            let pos = values[j];
            if lp.free[j] {
                pos - values[neg_col[j]]
            } else {
                pos.max(0.0)
            }
        })
        .collect();
    if !bounded {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            z,
            objective_value: f64::NEG_INFINITY,
            duals_eq: vec![0.0; n_eq],
            duals_le: vec![0.0; n_le],
        });
    }
    let residual = primal_residual(lp, &z);
    if residual > RESIDUAL_TOL {
        return Err(Error::Numerical(format!(
            "optimal point violates a constraint by {residual:e}"
        )));
    }
    // y_i = c_B B^{-1} e_i = -(reduced cost of artificial i), undoing row flips
    let duals: Vec<f64> = (0..m).map(|i| -tab.d[first_art + i] * sign[i]).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.evaluate(&z),
        z,
        duals_eq: duals[..n_eq].to_vec(),
        duals_le: duals[n_eq..].to_vec(),
    })
}

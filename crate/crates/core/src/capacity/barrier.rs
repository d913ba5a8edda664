//! Log-barrier Newton method producing a near-central starting point for
//! Frank-Wolfe.
//!
//! At the central point for barrier weight `μ`, stationarity gives
//! `∇f = μ/z - ν a - Σ_b λ_b 1_b` with `ν (Λ - a·z) = μ`, hence for every
//! feasible `v`: `⟨∇f, z - v⟩ ≤ (d + 1) μ`. Driving `μ` down therefore drives
//! the Frank-Wolfe gap down, with relative precision on tiny coordinates
//! that additive Frank-Wolfe updates cannot reach.

use nalgebra::{DMatrix, DVector};

use super::frank_wolfe::LinearMap;
use crate::info::{mutual_information_raw, output_distribution};

/// Feasible set `{z ≥ 0 : Σ_{j ∈ block} z_j = 1 for each block, a·z ≤ Λ}`.
/// Variables outside every block are fixed at zero.
pub(crate) struct Polytope {
    pub blocks: Vec<Vec<usize>>,
    pub budget: Option<(Vec<f64>, f64)>,
}

struct Problem<'a> {
    p: &'a [f64],
    map: &'a LinearMap,
    vars: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    budget: Option<(Vec<f64>, f64)>,
}

impl Problem<'_> {
    fn full(&self, x: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.map.dim()];
        for (&j, &v) in self.vars.iter().zip(x) {
            z[j] = v;
        }
        z
    }

    fn slack(&self, x: &[f64]) -> Option<f64> {
        self.budget
            .as_ref()
            .map(|(a, lam)| lam - a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>())
    }

    fn value(&self, x: &[f64], v: &mut [f64]) -> f64 {
        self.map.apply(&self.full(x), v);
        mutual_information_raw(self.p, v, self.map.ny)
    }

    fn barrier(&self, t: f64, x: &[f64], v: &mut [f64]) -> f64 {
        let mut b = t * self.value(x, v) - x.iter().map(|u| u.ln()).sum::<f64>();
        if let Some(s) = self.slack(x) {
            b -= s.ln();
        }
        b
    }

    /// Gradient and Hessian of `f` over the free variables.
    #[allow(clippy::needless_range_loop)]
    fn derivatives(&self, x: &[f64], v: &mut [f64]) -> (Vec<f64>, DMatrix<f64>) {
        let (nx, ny) = (self.map.nx, self.map.ny);
        let n = self.vars.len();
        self.map.apply(&self.full(x), v);
        let py = output_distribution(self.p, v, ny);
        let ln2 = std::f64::consts::LN_2;
        let mut grad = vec![0.0; n];
        // rows[y] holds, for each x, the coefficients of V(y|x) on the free variables
        let mut rows = vec![vec![vec![0.0; n]; nx]; ny];
        for (k, &j) in self.vars.iter().enumerate() {
            for &(i, a) in &self.map.columns[j] {
                let (xx, y) = (i / ny, i % ny);
                rows[y][xx][k] += a;
                let px = self.p[xx];
                if px > 0.0 && v[i] > 0.0 {
                    grad[k] += a * px * (v[i] / py[y]).log2();
                }
            }
        }
        let mut h = DMatrix::<f64>::zeros(n, n);
        for y in 0..ny {
            if py[y] <= 0.0 {
                continue;
            }
            // Σ_x P(x)/V a_x a_x^T - (Σ_x P(x) a_x)(Σ_x P(x) a_x)^T / PV
            let mut mixed = vec![0.0; n];
            for xx in 0..nx {
                let i = xx * ny + y;
                let px = self.p[xx];
                if px == 0.0 || v[i] <= 0.0 {
                    continue;
                }
                let r = &rows[y][xx];
                let w = px / v[i];
                for a in 0..n {
                    if r[a] == 0.0 {
                        continue;
                    }
                    mixed[a] += px * r[a];
                    for b in 0..n {
                        h[(a, b)] += w * r[a] * r[b];
                    }
                }
            }
            for a in 0..n {
                if mixed[a] == 0.0 {
                    continue;
                }
                for b in 0..n {
                    h[(a, b)] -= mixed[a] * mixed[b] / py[y];
                }
            }
        }
        h /= ln2;
        (grad, h)
    }
}

/// Follows the central path from a strictly feasible `z0` until the
/// barrier bound `(d + 1) μ` falls below `target`. Returns the last centred
/// point reached; the caller certifies it with the Frank-Wolfe gap.
pub(crate) fn central_point(
    p: &[f64],
    map: &LinearMap,
    poly: &Polytope,
    z0: &[f64],
    target: f64,
) -> Vec<f64> {
    let mut vars: Vec<usize> = poly.blocks.iter().flatten().copied().collect();
    vars.sort_unstable();
    let pos: Vec<Option<usize>> = {
        let mut pos = vec![None; map.dim()];
        for (k, &j) in vars.iter().enumerate() {
            pos[j] = Some(k);
        }
        pos
    };
    let blocks: Vec<Vec<usize>> = poly
        .blocks
        .iter()
        .map(|b| b.iter().map(|&j| pos[j].expect("block variable")).collect())
        .collect();
    let budget = poly
        .budget
        .as_ref()
        .map(|(a, lam)| (vars.iter().map(|&j| a[j]).collect::<Vec<f64>>(), *lam));
    let prob = Problem {
        p,
        map,
        vars,
        blocks,
        budget,
    };
    let n = prob.vars.len();
    let k = prob.blocks.len();
    let mut x: Vec<f64> = prob.vars.iter().map(|&j| z0[j]).collect();
    let mut v = vec![0.0; map.nx * map.ny];
    let n_ineq = (n + usize::from(prob.budget.is_some())) as f64;
    let mut t = 1.0;
    loop {
        for _ in 0..60 {
            let (g, h) = prob.derivatives(&x, &mut v);
            let slack = prob.slack(&x);
            // barrier gradient and Hessian in the scaled variables u = x / x_current
            let mut gs = DVector::<f64>::zeros(n);
            let mut hs = DMatrix::<f64>::zeros(n + k, n + k);
            for a in 0..n {
                let mut ga = t * g[a] - 1.0 / x[a];
                if let (Some(s), Some((c, _))) = (slack, prob.budget.as_ref()) {
                    ga += c[a] / s;
                }
                gs[a] = x[a] * ga;
                for b in 0..n {
                    let mut hab = t * h[(a, b)];
                    if let (Some(s), Some((c, _))) = (slack, prob.budget.as_ref()) {
                        hab += c[a] * c[b] / (s * s);
                    }
                    hs[(a, b)] = x[a] * hab * x[b];
                }
                hs[(a, a)] += 1.0;
            }
            for (r, block) in prob.blocks.iter().enumerate() {
                for &a in block {
                    hs[(n + r, a)] = x[a];
                    hs[(a, n + r)] = x[a];
                }
            }
            let mut rhs = DVector::<f64>::zeros(n + k);
            for a in 0..n {
                rhs[a] = -gs[a];
            }
            let Some(sol) = hs.lu().solve(&rhs) else {
                return prob.full(&x);
            };
            let du: Vec<f64> = (0..n).map(|a| sol[a]).collect();
            let decrement: f64 = -(0..n).map(|a| gs[a] * du[a]).sum::<f64>();
            if !decrement.is_finite() || decrement <= 1e-14 {
                break;
            }
            let dx: Vec<f64> = (0..n).map(|a| x[a] * du[a]).collect();
            // largest step keeping the iterate strictly feasible
            let mut step: f64 = 1.0;
            for &d in &du {
                if d < 0.0 {
                    step = step.min(-0.99 / d);
                }
            }
            if let (Some(s), Some((c, _))) = (slack, prob.budget.as_ref()) {
                let ds: f64 = -(0..n).map(|a| c[a] * dx[a]).sum::<f64>();
                if ds < 0.0 {
                    step = step.min(-0.99 * s / ds);
                }
            }
            let phi0 = prob.barrier(t, &x, &mut v);
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = (0..n).map(|a| x[a] + step * dx[a]).collect();
                let feasible =
                    trial.iter().all(|&u| u > 0.0) && prob.slack(&trial).is_none_or(|s| s > 0.0);
                if feasible {
                    let phi = prob.barrier(t, &trial, &mut v);
                    if phi <= phi0 - 0.25 * step * decrement {
                        x = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted || decrement <= 1e-10 {
                break;
            }
        }
        if n_ineq / t <= target {
            return prob.full(&x);
        }
        t *= 10.0;
    }
}

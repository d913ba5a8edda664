//! Away-step Frank-Wolfe for `min_z I(P, V(z))` over a polytope, where `V` is
//! linear in `z`.
//!
//! `F(V) = Σ_{x,y} P(x) V(y|x) log2(V(y|x) / (PV)(y))` is 1-homogeneous in `V`,
//! so `⟨∇f(z), z⟩ = f(z)` and the Frank-Wolfe gap is `f(z) - min_v ⟨∇f(z), v⟩`.

use crate::error::{Error, Result};
use crate::info::{mutual_information_raw, output_distribution};

pub const GAP_TOL: f64 = 1e-7;
pub const MAX_ITER: usize = 10_000;

/// `V = Σ_j z_j · column_j`, each column a sparse vector over `(x, y)` cells.
pub(crate) struct LinearMap {
    pub nx: usize,
    pub ny: usize,
    pub columns: Vec<Vec<(usize, f64)>>,
}

impl LinearMap {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (col, &zj) in self.columns.iter().zip(z) {
            if zj != 0.0 {
                for &(i, a) in col {
                    out[i] += zj * a;
                }
            }
        }
    }
}

/// Linear minimization oracle over the feasible polytope.
pub(crate) trait Lmo {
    /// A vertex minimizing `⟨g, v⟩`; entries of `g` may be `-inf`.
    fn minimize(&mut self, g: &[f64]) -> Result<Vec<f64>>;
}

pub(crate) struct FwOutcome {
    pub z: Vec<f64>,
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// `⟨g, v⟩` skipping zero coordinates of `v`.
pub(crate) fn dot(g: &[f64], v: &[f64]) -> f64 {
    g.iter()
        .zip(v)
        .filter(|(_, &b)| b != 0.0)
        .map(|(&a, &b)| a * b)
        .sum()
}

struct Objective<'a> {
    p: &'a [f64],
    map: &'a LinearMap,
    v: Vec<f64>,
    dv: Vec<f64>,
    trial: Vec<f64>,
}

impl<'a> Objective<'a> {
    fn new(p: &'a [f64], map: &'a LinearMap) -> Self {
        let cells = map.nx * map.ny;
        Objective {
            p,
            map,
            v: vec![0.0; cells],
            dv: vec![0.0; cells],
            trial: vec![0.0; cells],
        }
    }

    /// Value and gradient at `z`.
    fn eval(&mut self, z: &[f64], grad: &mut [f64]) -> f64 {
        let ny = self.map.ny;
        self.map.apply(z, &mut self.v);
        let py = output_distribution(self.p, &self.v, ny);
        // h = ∂F/∂V; a zero cell with reachable output has derivative -inf,
        // an unreachable output contributes a nonnegative nonlinear term whose
        // linear lower bound is 0
        let h: Vec<f64> = self
            .v
            .iter()
            .enumerate()
            .map(|(i, &vi)| {
                let px = self.p[i / ny];
                let q = py[i % ny];
                if px == 0.0 || q == 0.0 {
                    0.0
                } else if vi <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    px * (vi / q).log2()
                }
            })
            .collect();
        for (g, col) in grad.iter_mut().zip(&self.map.columns) {
            let mut acc = 0.0;
            for &(i, a) in col {
                acc += a * h[i];
            }
            *g = acc;
        }
        mutual_information_raw(self.p, &self.v, ny)
    }

    /// Sets the search direction `d` (in `z` space).
    fn set_direction(&mut self, d: &[f64]) {
        self.map.apply(d, &mut self.dv);
    }

    /// Derivative of `γ ↦ f(z + γ d)` at `γ`.
    fn slope(&mut self, gamma: f64) -> f64 {
        let ny = self.map.ny;
        for ((t, &v), &dv) in self.trial.iter_mut().zip(&self.v).zip(&self.dv) {
            *t = (v + gamma * dv).max(0.0);
        }
        let py = output_distribution(self.p, &self.trial, ny);
        let mut acc = 0.0;
        for (i, (&t, &dv)) in self.trial.iter().zip(&self.dv).enumerate() {
            let px = self.p[i / ny];
            let q = py[i % ny];
            if dv == 0.0 || px == 0.0 || q == 0.0 {
                continue;
            }
            if t <= 0.0 {
                return if dv > 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
            }
            acc += px * dv * (t / q).log2();
        }
        acc
    }

    /// Exact line search on `[0, gamma_max]` by bisection on the slope.
    ///
    /// Optimal steps can be many orders of magnitude below `gamma_max` when
    /// the minimizer puts tiny mass on expensive states, so the root is first
    /// bracketed geometrically and then bisected to relative precision.
    fn line_search(&mut self, gamma_max: f64) -> f64 {
        if self.slope(gamma_max) <= 0.0 {
            return gamma_max;
        }
        if self.slope(0.0) >= 0.0 {
            return 0.0;
        }
        let mut hi = gamma_max;
        let mut lo = hi / 16.0;
        while self.slope(lo) >= 0.0 {
            hi = lo;
            lo /= 16.0;
            if lo < 1e-300 {
                return 0.0;
            }
        }
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn same_vertex(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// Runs away-step Frank-Wolfe from a feasible `start` to the given gap tolerance.
pub(crate) fn minimize(
    p: &[f64],
    map: &LinearMap,
    lmo: &mut dyn Lmo,
    start: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<FwOutcome> {
    let d = map.dim();
    let mut obj = Objective::new(p, map);
    let mut atoms: Vec<(Vec<f64>, f64)> = vec![(start, 1.0)];
    let mut z = atoms[0].0.clone();
    let mut grad = vec![0.0; d];
    let mut dir = vec![0.0; d];
    let mut gap = f64::INFINITY;
    for it in 0..max_iter {
        let value = obj.eval(&z, &mut grad);
        let s = lmo.minimize(&grad)?;
        gap = dot(&grad, &z) - dot(&grad, &s);
        if gap <= tol {
            return Ok(FwOutcome {
                z,
                value,
                gap: gap.max(0.0),
                iterations: it,
            });
        }
        let (away, away_gap) = atoms
            .iter()
            .enumerate()
            .map(|(k, (v, _))| (k, dot(&grad, v) - dot(&grad, &z)))
            .fold((0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        let away_weight = atoms[away].1;
        let use_away = atoms.len() > 1 && away_gap > gap && away_weight < 1.0;
        let gamma_max = if use_away {
            for ((di, zi), vi) in dir.iter_mut().zip(&z).zip(&atoms[away].0) {
                *di = zi - vi;
            }
            away_weight / (1.0 - away_weight)
        } else {
            for ((di, zi), si) in dir.iter_mut().zip(&z).zip(&s) {
                *di = si - zi;
            }
            1.0
        };
        obj.set_direction(&dir);
        let gamma = obj.line_search(gamma_max);
        if gamma <= 0.0 {
            continue;
        }
        if use_away {
            for (_, w) in atoms.iter_mut() {
                *w *= 1.0 + gamma;
            }
            if gamma >= gamma_max {
                atoms.remove(away);
            } else {
                atoms[away].1 -= gamma;
            }
        } else if gamma >= 1.0 {
            atoms = vec![(s, 1.0)];
        } else {
            for (_, w) in atoms.iter_mut() {
                *w *= 1.0 - gamma;
            }
            match atoms.iter_mut().find(|(v, _)| same_vertex(v, &s)) {
                Some((_, w)) => *w += gamma,
                None => atoms.push((s, gamma)),
            }
        }
        atoms.retain(|(_, w)| *w > 0.0);
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        z.iter_mut().for_each(|v| *v = 0.0);
        for (v, w) in atoms.iter_mut() {
            *w /= total;
            for (zi, vi) in z.iter_mut().zip(v.iter()) {
                *zi += *w * vi;
            }
        }
    }
    if gap <= tol {
        let value = obj.eval(&z, &mut grad);
        return Ok(FwOutcome {
            z,
            value,
            gap,
            iterations: max_iter,
        });
    }
    Err(Error::NotConverged {
        iterations: max_iter,
        gap,
    })
}

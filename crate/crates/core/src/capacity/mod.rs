//! Constrained mutual-information minimization and the list-decoding rate
//! bounds built on it.
//!
//! `I(P, Λ) = min_{Q ∈ Q(Λ)} I(P, Σ_s W(·|·,s) Q(s))` where
//! `Q(Λ) = {Q : Σ_s Q(s) l(s) ≤ Λ}`, and its input-dependent variant over
//! `U(P, Λ) = {U : Σ_{x,s} P(x) U(s|x) l(s) ≤ Λ}`. Both are solved with
//! away-step Frank-Wolfe.

mod barrier;
pub mod curve;
pub(crate) mod frank_wolfe;

use std::collections::HashMap;

use crate::dist::{Avc, ConditionalChannel, Dist};
use crate::error::{Error, Result};
use crate::linprog::{self, LinearProgram, LpStatus};
use crate::symmetry::{
    below_budget, near_budget, CostKind, CostOracle, LpCosts, MemoCosts, DEFAULT_MMAX,
};
use barrier::Polytope;
use frank_wolfe::{LinearMap, Lmo};

pub use curve::{
    capacity_curve, capacity_curve_with, format_sig, write_curve_csv, CapacityCurvePoint,
    CURVE_HEADER,
};
pub use frank_wolfe::{GAP_TOL, MAX_ITER};

/// Default number of outer grid points for binary inputs.
pub const DEFAULT_GRID: usize = 1001;

/// Budget slack when deciding which states fit under `Λ`.
const BUDGET_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Minimizer {
    States(Dist),
    Dependent(ConditionalChannel),
}

#[derive(Clone, Debug)]
pub struct ConstrainedMinResult {
    /// Minimum mutual information in bits.
    pub value: f64,
    pub minimizer: Minimizer,
    /// Frank-Wolfe gap at termination, an upper bound on `value - optimum`.
    pub duality_gap: f64,
    pub iterations: usize,
}

fn check_budget(avc: &Avc, lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "budget {lambda} is not finite"
        )));
    }
    if lambda < avc.min_cost() - BUDGET_EPS {
        return Err(Error::InfeasibleBudget {
            lambda,
            min_cost: avc.min_cost(),
        });
    }
    Ok(())
}

fn check_input(avc: &Avc, p: &Dist) -> Result<()> {
    if p.len() != avc.nx() {
        return Err(Error::Dimension(format!(
            "input distribution of length {} for {} inputs",
            p.len(),
            avc.nx()
        )));
    }
    Ok(())
}

/// Vertices of `Q(Λ)`: affordable point masses and, for each pair with
/// `l(a) < Λ < l(b)`, the mixture of `a` and `b` with expected cost `Λ`.
pub(crate) fn budget_vertices(cost: &[f64], lambda: f64) -> Vec<Vec<f64>> {
    let ns = cost.len();
    let mut out = Vec::new();
    for s in 0..ns {
        if cost[s] <= lambda + BUDGET_EPS {
            let mut v = vec![0.0; ns];
            v[s] = 1.0;
            out.push(v);
        }
    }
    for a in 0..ns {
        for b in 0..ns {
            if cost[a] < lambda - BUDGET_EPS && cost[b] > lambda + BUDGET_EPS {
                let theta = (cost[b] - lambda) / (cost[b] - cost[a]);
                let mut v = vec![0.0; ns];
                v[a] = theta;
                v[b] = 1.0 - theta;
                out.push(v);
            }
        }
    }
    out
}

/// The budget leaves no room above the cheapest state cost, so `Q(Λ)` has
/// no interior and the barrier works on the cheapest states only.
fn tight_budget(avc: &Avc, lambda: f64) -> bool {
    lambda - avc.min_cost() <= 1e-12 * lambda.abs().max(1.0)
}

fn affordable(avc: &Avc, lambda: f64) -> Vec<usize> {
    (0..avc.ns())
        .filter(|&s| avc.cost()[s] <= lambda + BUDGET_EPS)
        .collect()
}

/// Barrier bound targeted before Frank-Wolfe takes over, relative to the gap tolerance.
const BARRIER_FRACTION: f64 = 1e-2;

fn barycenter(vertices: &[Vec<f64>]) -> Vec<f64> {
    let mut c = vec![0.0; vertices[0].len()];
    for v in vertices {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi / vertices.len() as f64;
        }
    }
    c
}

struct StateLmo {
    vertices: Vec<Vec<f64>>,
}

impl Lmo for StateLmo {
    fn minimize(&mut self, g: &[f64]) -> Result<Vec<f64>> {
        let best = self
            .vertices
            .iter()
            .map(|v| frank_wolfe::dot(g, v))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |b, (k, val)| if val < b.1 { (k, val) } else { b },
            );
        Ok(self.vertices[best.0].clone())
    }
}

struct DependentLmo<'a> {
    avc: &'a Avc,
    p: &'a Dist,
    lambda: f64,
}

impl Lmo for DependentLmo<'_> {
    fn minimize(&mut self, g: &[f64]) -> Result<Vec<f64>> {
        let (nx, ns) = (self.avc.nx(), self.avc.ns());
        let floor = g
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |a, &b| a.min(b));
        let c: Vec<f64> = g
            .iter()
            .map(|&v| if v.is_finite() { v } else { floor - 1e6 })
            .collect();
        let mut lp = LinearProgram::new(c);
        for x in 0..nx {
            let row: Vec<(usize, f64)> = (0..ns).map(|s| (x * ns + s, 1.0)).collect();
            lp.add_eq_sparse(&row, 1.0);
        }
        let budget: Vec<(usize, f64)> = (0..nx)
            .flat_map(|x| (0..ns).map(move |s| (x, s)))
            .map(|(x, s)| (x * ns + s, self.p[x] * self.avc.cost()[s]))
            .collect();
        lp.add_le_sparse(&budget, self.lambda);
        let sol = linprog::solve(&lp)?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Lp {
                context: "dependent-state linear minimization",
                status: sol.status,
            });
        }
        Ok(sol.z.into_iter().map(|v| v.max(0.0)).collect())
    }
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    clipped.into_iter().map(|x| x / sum).collect()
}

/// `I(P, Λ)`: minimum of `I(P, V_Q)` over state distributions with
/// expected cost at most `Λ`.
pub fn min_info_over_states(avc: &Avc, p: &Dist, lambda: f64) -> Result<ConstrainedMinResult> {
    min_info_over_states_tol(avc, p, lambda, GAP_TOL)
}

pub fn min_info_over_states_tol(
    avc: &Avc,
    p: &Dist,
    lambda: f64,
    tol: f64,
) -> Result<ConstrainedMinResult> {
    check_input(avc, p)?;
    check_budget(avc, lambda)?;
    let (nx, ns, ny) = (avc.nx(), avc.ns(), avc.ny());
    let columns = (0..ns)
        .map(|s| {
            (0..nx)
                .flat_map(|x| (0..ny).map(move |y| (x, y)))
                .filter(|&(x, y)| avc.w(x, s, y) > 0.0)
                .map(|(x, y)| (x * ny + y, avc.w(x, s, y)))
                .collect()
        })
        .collect();
    let map = LinearMap { nx, ny, columns };
    let vertices = budget_vertices(avc.cost(), lambda);
    let z0 = barycenter(&vertices);
    let poly = if tight_budget(avc, lambda) {
        Polytope {
            blocks: vec![affordable(avc, lambda)],
            budget: None,
        }
    } else {
        Polytope {
            blocks: vec![(0..ns).collect()],
            budget: Some((avc.cost().to_vec(), lambda)),
        }
    };
    let start = barrier::central_point(p.as_slice(), &map, &poly, &z0, tol * BARRIER_FRACTION);
    let mut lmo = StateLmo { vertices };
    let out = frank_wolfe::minimize(p.as_slice(), &map, &mut lmo, start, tol, MAX_ITER)?;
    Ok(ConstrainedMinResult {
        value: out.value,
        minimizer: Minimizer::States(Dist::from_weights(out.z)),
        duality_gap: out.gap,
        iterations: out.iterations,
    })
}

/// Minimum of `I(P, V_U)` over input-dependent state kernels `U(s|x)` with
/// `Σ P(x) U(s|x) l(s) ≤ Λ`.
pub fn min_info_over_dependent_states(
    avc: &Avc,
    p: &Dist,
    lambda: f64,
) -> Result<ConstrainedMinResult> {
    check_input(avc, p)?;
    check_budget(avc, lambda)?;
    let (nx, ns, ny) = (avc.nx(), avc.ns(), avc.ny());
    let columns = (0..nx)
        .flat_map(|x| (0..ns).map(move |s| (x, s)))
        .map(|(x, s)| {
            (0..ny)
                .filter(|&y| avc.w(x, s, y) > 0.0)
                .map(|y| (x * ny + y, avc.w(x, s, y)))
                .collect()
        })
        .collect();
    let map = LinearMap { nx, ny, columns };
    let q0 = barycenter(&budget_vertices(avc.cost(), lambda));
    // rows the budget does not see start uniform, which keeps them interior
    let z0: Vec<f64> = (0..nx)
        .flat_map(|x| {
            if p[x] > 0.0 {
                q0.clone()
            } else {
                vec![1.0 / ns as f64; ns]
            }
        })
        .collect();
    let poly = if tight_budget(avc, lambda) {
        let cheap = affordable(avc, lambda);
        Polytope {
            blocks: (0..nx)
                .map(|x| {
                    if p[x] > 0.0 {
                        cheap.iter().map(|&s| x * ns + s).collect()
                    } else {
                        (x * ns..(x + 1) * ns).collect()
                    }
                })
                .collect(),
            budget: None,
        }
    } else {
        Polytope {
            blocks: (0..nx).map(|x| (x * ns..(x + 1) * ns).collect()).collect(),
            budget: Some((
                (0..nx * ns)
                    .map(|j| p[j / ns] * avc.cost()[j % ns])
                    .collect(),
                lambda,
            )),
        }
    };
    let start = barrier::central_point(p.as_slice(), &map, &poly, &z0, GAP_TOL * BARRIER_FRACTION);
    let mut lmo = DependentLmo { avc, p, lambda };
    let out = frank_wolfe::minimize(p.as_slice(), &map, &mut lmo, start, GAP_TOL, MAX_ITER)?;
    let rows: Vec<f64> = out.z.chunks(ns).flat_map(normalized).collect();
    Ok(ConstrainedMinResult {
        value: out.value,
        minimizer: Minimizer::Dependent(ConditionalChannel::new(nx, ns, 1, rows)?),
        duality_gap: out.gap,
        iterations: out.iterations,
    })
}

/// Outer-maximization settings.
#[derive(Clone, Copy, Debug)]
pub struct OuterOptions {
    /// Grid points on `[0, 1]` for binary inputs; for larger input alphabets,
    /// the finest simplex mesh with at most this many points.
    pub grid: usize,
    pub m_max: usize,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions {
            grid: DEFAULT_GRID,
            m_max: DEFAULT_MMAX,
        }
    }
}

/// A rate bound and where it is attained.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub value: f64,
    /// `None` when the region is empty.
    pub p: Option<Dist>,
    pub empty_region: bool,
    /// Some symmetrizing cost examined lay within the threshold margin of `Λ`.
    pub tie: bool,
}

/// Points of the finest mesh `{k/r}` on the simplex with at most `grid` points.
pub fn simplex_mesh(nx: usize, grid: usize) -> Vec<Dist> {
    let count = |r: usize| -> usize {
        // C(r + nx - 1, nx - 1)
        let mut c: u128 = 1;
        for i in 1..nx as u128 {
            c = c * (r as u128 + i) / i;
        }
        c.min(usize::MAX as u128) as usize
    };
    let mut r = 1;
    while count(r + 1) <= grid {
        r += 1;
    }
    let mut out = Vec::new();
    fn rec(nx: usize, left: usize, r: usize, cur: &mut Vec<f64>, out: &mut Vec<Dist>) {
        if cur.len() == nx - 1 {
            cur.push(left as f64 / r as f64);
            out.push(Dist::from_weights(cur.clone()));
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c as f64 / r as f64);
            rec(nx, left - c, r, cur, out);
            cur.pop();
        }
    }
    rec(nx, r, r, &mut Vec::new(), &mut out);
    out
}

fn binary_point(k: usize, grid: usize) -> Dist {
    Dist::from_weights(vec![
        (grid - 1 - k) as f64 / (grid - 1) as f64,
        k as f64 / (grid - 1) as f64,
    ])
}

fn binary_at(p1: f64) -> Dist {
    Dist::from_weights(vec![1.0 - p1, p1])
}

/// Maximizes `objective` over the qualifying points of the input grid.
///
/// For binary inputs with a concave objective each maximal run of
/// consecutive qualifying grid points is searched by integer ternary search,
/// which finds the same maximum as a full scan. The best grid point is then
/// refined by golden-section search between its neighbours, shrunk to the
/// qualifying side of any region boundary by bisection.
pub(crate) struct OuterSearch<'a> {
    pub nx: usize,
    pub grid: usize,
    pub concave: bool,
    /// Region membership; the flag tells whether the point is on the grid.
    pub qualify: &'a mut dyn FnMut(&Dist, bool) -> Result<bool>,
    pub objective: &'a mut dyn FnMut(&Dist) -> Result<f64>,
}

impl OuterSearch<'_> {
    pub fn run(self) -> Result<Option<(f64, Dist)>> {
        if self.grid < 2 {
            return Err(Error::InvalidArgument(
                "grid needs at least 2 points".into(),
            ));
        }
        if self.nx == 2 {
            self.run_binary()
        } else {
            let mut best: Option<(f64, Dist)> = None;
            for p in simplex_mesh(self.nx, self.grid) {
                if (self.qualify)(&p, true)? {
                    let v = (self.objective)(&p)?;
                    if best.as_ref().is_none_or(|(b, _)| v > *b) {
                        best = Some((v, p));
                    }
                }
            }
            Ok(best)
        }
    }

    fn run_binary(self) -> Result<Option<(f64, Dist)>> {
        let OuterSearch {
            grid,
            concave,
            qualify,
            objective,
            ..
        } = self;
        let ok = (0..grid)
            .map(|k| qualify(&binary_point(k, grid), true))
            .collect::<Result<Vec<bool>>>()?;
        let mut values: HashMap<usize, f64> = HashMap::new();
        let mut value_at = |k: usize, objective: &mut dyn FnMut(&Dist) -> Result<f64>| {
            if let Some(&v) = values.get(&k) {
                return Ok(v);
            }
            let v = objective(&binary_point(k, grid))?;
            values.insert(k, v);
            Ok::<f64, Error>(v)
        };
        let mut best: Option<(f64, usize)> = None;
        let mut k = 0;
        while k < grid {
            if !ok[k] {
                k += 1;
                continue;
            }
            let start = k;
            while k + 1 < grid && ok[k + 1] {
                k += 1;
            }
            let end = k;
            k += 1;
            let (mut a, mut b) = (start, end);
            if concave {
                while b - a > 3 {
                    let m1 = a + (b - a) / 3;
                    let m2 = b - (b - a) / 3;
                    let (f1, f2) = (value_at(m1, objective)?, value_at(m2, objective)?);
                    if f1 < f2 {
                        a = m1 + 1;
                    } else if f1 > f2 {
                        b = m2 - 1;
                    } else {
                        a = m1;
                        b = m2;
                    }
                }
            }
            for j in a..=b {
                let v = value_at(j, objective)?;
                if best.is_none_or(|(bv, _)| v > bv) {
                    best = Some((v, j));
                }
            }
        }
        let Some((grid_value, kb)) = best else {
            return Ok(None);
        };
        let step = 1.0 / (grid - 1) as f64;
        let pk = kb as f64 * step;
        let mut edge = |inside: f64, outside: f64| -> Result<f64> {
            let (mut good, mut bad) = (inside, outside);
            for _ in 0..40 {
                let mid = 0.5 * (good + bad);
                if qualify(&binary_at(mid), false)? {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            Ok(good)
        };
        let lo = if kb == 0 {
            pk
        } else if ok[kb - 1] {
            pk - step
        } else {
            edge(pk, pk - step)?
        };
        let hi = if kb + 1 == grid {
            pk
        } else if ok[kb + 1] {
            pk + step
        } else {
            edge(pk, pk + step)?
        };
        let (p_ref, v_ref) = golden_max(lo, hi, pk, grid_value, &mut |t| objective(&binary_at(t)))?;
        if v_ref > grid_value && qualify(&binary_at(p_ref), false)? {
            Ok(Some((v_ref, binary_at(p_ref))))
        } else {
            Ok(Some((grid_value, binary_point(kb, grid))))
        }
    }
}

/// Golden-section maximization on `[lo, hi]`, seeded with a known point.
fn golden_max(
    mut lo: f64,
    mut hi: f64,
    seed: f64,
    seed_value: f64,
    f: &mut dyn FnMut(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let mut best = (seed, seed_value);
    if hi - lo <= 1e-12 {
        return Ok(best);
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > 1e-9 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// `C_std(Λ) = max_P I(P, Λ)`, the randomized-coding capacity.
pub fn c_std(avc: &Avc, lambda: f64, grid: usize) -> Result<(f64, Dist)> {
    check_budget(avc, lambda)?;
    let mut qualify = |_: &Dist, _: bool| Ok(true);
    let mut objective = |p: &Dist| min_info_over_states(avc, p, lambda).map(|r| r.value);
    OuterSearch {
        nx: avc.nx(),
        grid,
        concave: true,
        qualify: &mut qualify,
        objective: &mut objective,
    }
    .run()
    .map(|r| r.expect("unrestricted region is nonempty"))
}

/// `C_dep(Λ) = max_P min_{U ∈ U(P,Λ)} I(P, V_U)`.
pub fn c_dep(avc: &Avc, lambda: f64, grid: usize) -> Result<(f64, Dist)> {
    check_budget(avc, lambda)?;
    let mut qualify = |_: &Dist, _: bool| Ok(true);
    let mut objective = |p: &Dist| min_info_over_dependent_states(avc, p, lambda).map(|r| r.value);
    OuterSearch {
        nx: avc.nx(),
        grid,
        concave: false,
        qualify: &mut qualify,
        objective: &mut objective,
    }
    .run()
    .map(|r| r.expect("unrestricted region is nonempty"))
}

/// Whether `P` lies in the bound's region: no `m` in `L..=m_max` has cost
/// below the budget. Sets `tie` when a cost examined is within the margin.
pub(crate) fn in_region(
    oracle: &dyn CostOracle,
    kind: CostKind,
    p: &Dist,
    lambda: f64,
    list_size: usize,
    m_max: usize,
    tie: &mut bool,
) -> Result<bool> {
    for m in list_size..=m_max {
        let c = oracle.cost(kind, p, m)?;
        if near_budget(c, lambda) {
            *tie = true;
        }
        if below_budget(c, lambda) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Maximum of `I(P, Λ)` over inputs whose threshold of the given kind is
/// below `L`.
pub fn region_bound_with(
    avc: &Avc,
    oracle: &dyn CostOracle,
    kind: CostKind,
    lambda: f64,
    list_size: usize,
    opts: OuterOptions,
    info: &mut dyn FnMut(&Dist) -> Result<f64>,
) -> Result<BoundResult> {
    check_budget(avc, lambda)?;
    if list_size == 0 {
        return Err(Error::InvalidArgument(
            "list size must be at least 1".into(),
        ));
    }
    let mut tie = false;
    // ties are reported at grid points only; boundary bisection approaches
    // points of equality by construction
    let mut qualify = |p: &Dist, on_grid: bool| {
        let mut seen = false;
        let ok = in_region(oracle, kind, p, lambda, list_size, opts.m_max, &mut seen)?;
        tie |= seen && on_grid;
        Ok(ok)
    };
    let found = OuterSearch {
        nx: avc.nx(),
        grid: opts.grid,
        concave: true,
        qualify: &mut qualify,
        objective: info,
    }
    .run()?;
    Ok(match found {
        Some((value, p)) => BoundResult {
            value,
            p: Some(p),
            empty_region: false,
            tie,
        },
        None => BoundResult {
            value: 0.0,
            p: None,
            empty_region: true,
            tie,
        },
    })
}

fn bound(
    avc: &Avc,
    kind: CostKind,
    lambda: f64,
    list_size: usize,
    grid: usize,
) -> Result<BoundResult> {
    let oracle = MemoCosts::new(LpCosts::new(avc));
    let mut info = |p: &Dist| min_info_over_states(avc, p, lambda).map(|r| r.value);
    region_bound_with(
        avc,
        &oracle,
        kind,
        lambda,
        list_size,
        OuterOptions {
            grid,
            m_max: DEFAULT_MMAX,
        },
        &mut info,
    )
}

/// Lower bound on the list-`L` capacity: `max I(P, Λ)` over `P` whose weak
/// symmetrizability threshold is below `L`.
pub fn achievable_bound(
    avc: &Avc,
    lambda: f64,
    list_size: usize,
    grid: usize,
) -> Result<BoundResult> {
    bound(avc, CostKind::Weak, lambda, list_size, grid)
}

/// Upper bound on the list-`L` capacity: `max I(P, Λ)` over `P` whose strong
/// symmetrizability threshold is below `L`.
pub fn converse_bound(
    avc: &Avc,
    lambda: f64,
    list_size: usize,
    grid: usize,
) -> Result<BoundResult> {
    bound(avc, CostKind::Strong, lambda, list_size, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noisy_avc() -> Avc {
        Avc::from_nested(
            &[
                vec![vec![0.9, 0.1], vec![0.4, 0.6]],
                vec![vec![0.2, 0.8], vec![0.7, 0.3]],
            ],
            vec![0.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn budget_vertices_cover_the_polytope() {
        let v = budget_vertices(&[0.0, 1.0, 4.0], 2.0);
        // two point masses and the edges (0,2), (1,2)
        assert_eq!(v.len(), 4);
        for q in &v {
            let c: f64 = q.iter().zip([0.0, 1.0, 4.0]).map(|(a, b)| a * b).sum();
            assert!(c <= 2.0 + 1e-12);
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_budget_forces_free_state() {
        // noiseless when the free state is used
        let avc = Avc::from_nested(
            &[
                vec![vec![1.0, 0.0], vec![0.5, 0.5]],
                vec![vec![0.0, 1.0], vec![0.5, 0.5]],
            ],
            vec![0.0, 1.0],
        )
        .unwrap();
        let p = Dist::new(vec![0.3, 0.7]).unwrap();
        let r = min_info_over_states(&avc, &p, 0.0).unwrap();
        let h = -0.3f64 * 0.3f64.log2() - 0.7 * 0.7f64.log2();
        assert!((r.value - h).abs() < 1e-9);
        // the unconstrained minimum uses the useless state
        let r = min_info_over_states(&avc, &p, 1.0).unwrap();
        assert!(r.value.abs() < 1e-7);
        assert!(r.duality_gap <= GAP_TOL);
    }

    #[test]
    fn infeasible_budget() {
        let avc = noisy_avc().with_cost(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            min_info_over_states(&avc, &Dist::uniform(2), 0.5),
            Err(Error::InfeasibleBudget { .. })
        ));
    }

    #[test]
    fn dependent_is_no_larger() {
        let avc = noisy_avc();
        let p = Dist::new(vec![0.35, 0.65]).unwrap();
        for lambda in [0.0, 0.2, 0.5, 1.0] {
            let a = min_info_over_states(&avc, &p, lambda).unwrap();
            let b = min_info_over_dependent_states(&avc, &p, lambda).unwrap();
            assert!(b.value <= a.value + 1e-9);
            assert!(b.duality_gap <= GAP_TOL);
        }
    }

    #[test]
    fn mesh_sizes() {
        assert_eq!(simplex_mesh(2, 11).len(), 11);
        let m = simplex_mesh(3, 100);
        // r = 12 gives 91 points, r = 13 gives 105
        assert_eq!(m.len(), 91);
    }

    #[test]
    fn c_std_of_state_independent_channel() {
        // a BSC(0.1) that ignores the state
        let row = vec![vec![0.9, 0.1], vec![0.9, 0.1]];
        let row1 = vec![vec![0.1, 0.9], vec![0.1, 0.9]];
        let avc = Avc::from_nested(&[row, row1], vec![0.0, 1.0]).unwrap();
        let (c, p) = c_std(&avc, 0.5, 101).unwrap();
        let h = -0.1f64 * 0.1f64.log2() - 0.9 * 0.9f64.log2();
        assert!((c - (1.0 - h)).abs() < 1e-7);
        assert!((p[1] - 0.5).abs() < 1e-4);
    }

    fn outer(avc: &Avc, lambda: f64, grid: usize, concave: bool) -> (f64, Dist) {
        let mut qualify = |_: &Dist, _: bool| Ok(true);
        let mut objective = |p: &Dist| min_info_over_states(avc, p, lambda).map(|r| r.value);
        OuterSearch {
            nx: 2,
            grid,
            concave,
            qualify: &mut qualify,
            objective: &mut objective,
        }
        .run()
        .unwrap()
        .unwrap()
    }

    #[test]
    fn ternary_matches_full_scan() {
        let avc = noisy_avc();
        let ex = crate::example::build_example(4).unwrap();
        for (avc, lambda) in [(&avc, 0.3), (&avc, 1.0), (ex.avc(), 2.0), (ex.avc(), 16.0)] {
            let (a, _) = outer(avc, lambda, 201, true);
            let (b, _) = outer(avc, lambda, 201, false);
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

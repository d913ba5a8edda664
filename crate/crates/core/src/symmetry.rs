//! Symmetrizing kernels, weak/strong symmetrizing costs and symmetrizability
//! thresholds.
//!
//! A kernel `U(s | x_1..x_m)` symmetrizes an AVC when
//! `V(y | x, x_1..x_m) = Σ_s W(y|x,s) U(s|x_1..x_m)` is invariant under every
//! permutation of its `m + 1` input slots.
//!
//! Two LP formulations are provided:
//!
//! * [`Formulation::Full`] has one variable per `(x^m, s)` and one equality
//!   per adjacent transposition of the input slots, as produced by
//!   [`build_symmetry_constraints`].
//! * [`Formulation::Exchangeable`] restricts `U` to depend on `x^m` only
//!   through its type (multiset). Both cost objectives and the feasible set
//!   are invariant under permuting the last `m` slots, so averaging any
//!   optimal kernel over those permutations gives an optimal type-indexed
//!   kernel: the optimal values coincide. With `U` symmetric in its own
//!   inputs, invariance under the single transposition of slots 0 and 1
//!   already generates the full symmetric group.
//!
//! The strong cost's inner maximum over joint inputs with fixed marginals
//! is dualized into potentials `μ_i(x)` with `Σ_i μ_i(x_i) ≥ Σ_s U(s|x^m) l(s)`.
//! In the exchangeable formulation the potentials can be taken equal across
//! coordinates for the same averaging reason.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use crate::dist::{checked_pow, tuple_digits, Avc, ConditionalChannel, Dist};
use crate::error::{Error, Result};
use crate::linprog::{self, LinearProgram, LpStatus};

/// Default largest list size scanned by the threshold computations.
pub const DEFAULT_MMAX: usize = 8;

/// `λ < Λ` is evaluated as `λ < Λ - THRESHOLD_MARGIN`.
pub const THRESHOLD_MARGIN: f64 = 1e-9;

/// Default cap on `nx^m · ns` for the full formulation.
pub const FULL_VARIABLE_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CostKind {
    Weak,
    Strong,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Formulation {
    #[default]
    Exchangeable,
    Full,
}

type SparseRow = Vec<(usize, f64)>;

fn canonical(mut row: SparseRow) -> Option<SparseRow> {
    row.sort_by_key(|&(j, _)| j);
    let mut merged: SparseRow = Vec::with_capacity(row.len());
    for (j, a) in row {
        match merged.last_mut() {
            Some((k, acc)) if *k == j => *acc += a,
            _ => merged.push((j, a)),
        }
    }
    merged.retain(|&(_, a)| a.abs() > 1e-15);
    let first = merged.first()?.1;
    if first < 0.0 {
        for (_, a) in merged.iter_mut() {
            *a = -*a;
        }
    }
    Some(merged)
}

#[derive(Default)]
struct RowSet {
    seen: HashSet<Vec<(usize, u64)>>,
    rows: Vec<SparseRow>,
}

impl RowSet {
    fn push(&mut self, row: SparseRow) {
        if let Some(row) = canonical(row) {
            let key = row.iter().map(|&(j, a)| (j, a.to_bits())).collect();
            if self.seen.insert(key) {
                self.rows.push(row);
            }
        }
    }
}

/// Linear equalities `Σ coef · U(s|x^m) = 0` expressing that the composed
/// channel is invariant under adjacent transpositions of its input slots.
///
/// Variable `tuple_index(x^m) * ns + s` holds `U(s|x^m)`. Normalization of
/// each `U(·|x^m)` is not part of the rows.
#[derive(Clone, Debug)]
pub struct SymmetryConstraintSystem {
    nx: usize,
    ns: usize,
    arity: usize,
    rows: Vec<SparseRow>,
}

impl SymmetryConstraintSystem {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_variables(&self) -> usize {
        self.nx.pow(self.arity as u32) * self.ns
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Largest absolute row residual of a kernel.
    pub fn residual(&self, u: &ConditionalChannel) -> f64 {
        let table = u.as_slice();
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, a)| a * table[j]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetrizing(&self, u: &ConditionalChannel, tol: f64) -> bool {
        u.arity() == self.arity && u.nx() == self.nx && u.ns() == self.ns && self.residual(u) <= tol
    }
}

/// Builds the full symmetry system for arity `m` with the default size cap.
pub fn build_symmetry_constraints(avc: &Avc, m: usize) -> Result<SymmetryConstraintSystem> {
    build_symmetry_constraints_capped(avc, m, FULL_VARIABLE_CAP)
}

pub fn build_symmetry_constraints_capped(
    avc: &Avc,
    m: usize,
    cap: usize,
) -> Result<SymmetryConstraintSystem> {
    if m == 0 {
        return Err(Error::InvalidArgument("arity must be at least 1".into()));
    }
    let (nx, ns, ny) = (avc.nx(), avc.ns(), avc.ny());
    let tuples = checked_pow(nx, m)?;
    if tuples.saturating_mul(ns) > cap {
        return Err(Error::TooLarge(format!(
            "{tuples} input tuples x {ns} states exceeds the cap of {cap} variables"
        )));
    }
    let full = checked_pow(nx, m + 1)?;
    let mut set = RowSet::default();
    for z_idx in 0..full {
        let z = tuple_digits(z_idx, nx, m + 1);
        for k in 0..m {
            // the transposition maps z to swapped(z) and negates the row; keep one
            if z[k] >= z[k + 1] {
                continue;
            }
            let mut swapped = z.clone();
            swapped.swap(k, k + 1);
            let var = |t: &[usize]| crate::dist::tuple_index(&t[1..], nx) * ns;
            let (base_a, base_b) = (var(&z), var(&swapped));
            for y in 0..ny {
                let mut row = Vec::with_capacity(2 * ns);
                for s in 0..ns {
                    row.push((base_a + s, avc.w(z[0], s, y)));
                    row.push((base_b + s, -avc.w(swapped[0], s, y)));
                }
                set.push(row);
            }
        }
    }
    Ok(SymmetryConstraintSystem {
        nx,
        ns,
        arity: m,
        rows: set.rows,
    })
}

/// Types (multisets) of `m`-tuples over `nx` symbols, as count vectors.
#[derive(Clone, Debug)]
pub struct TypeIndex {
    nx: usize,
    arity: usize,
    types: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

fn compositions(nx: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(nx: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == nx - 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(nx, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(nx, m, &mut Vec::with_capacity(nx), &mut out);
    out
}

impl TypeIndex {
    pub fn new(nx: usize, arity: usize) -> Self {
        let types = compositions(nx, arity);
        let lookup = types
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, t)| (t, i))
            .collect();
        TypeIndex {
            nx,
            arity,
            types,
            lookup,
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn counts(&self, k: usize) -> &[usize] {
        &self.types[k]
    }

    pub fn index_of_counts(&self, counts: &[usize]) -> usize {
        self.lookup[counts]
    }

    /// Type index of a tuple.
    pub fn index_of_tuple(&self, xs: &[usize]) -> usize {
        let mut c = vec![0; self.nx];
        for &x in xs {
            c[x] += 1;
        }
        self.lookup[&c]
    }

    /// Probability of type `k` under i.i.d. inputs with law `p`.
    pub fn iid_probability(&self, k: usize, p: &Dist) -> f64 {
        let mut logp = ln_factorial(self.arity);
        for (x, &c) in self.types[k].iter().enumerate() {
            if c == 0 {
                continue;
            }
            if p[x] == 0.0 {
                return 0.0;
            }
            logp += c as f64 * p[x].ln() - ln_factorial(c);
        }
        logp.exp()
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Symmetry rows of the exchangeable formulation, over variables
/// `type_index * ns + s`.
fn exchangeable_rows(avc: &Avc, types: &TypeIndex) -> Vec<SparseRow> {
    let (nx, ns, ny) = (avc.nx(), avc.ns(), avc.ny());
    let m = types.arity;
    let mut set = RowSet::default();
    for rest in compositions(nx, m - 1) {
        for a in 0..nx {
            for b in a + 1..nx {
                let mut with_b = rest.clone();
                with_b[b] += 1;
                let mut with_a = rest.clone();
                with_a[a] += 1;
                let vb = types.index_of_counts(&with_b) * ns;
                let va = types.index_of_counts(&with_a) * ns;
                for y in 0..ny {
                    let mut row = Vec::with_capacity(2 * ns);
                    for s in 0..ns {
                        row.push((vb + s, avc.w(a, s, y)));
                        row.push((va + s, -avc.w(b, s, y)));
                    }
                    set.push(row);
                }
            }
        }
    }
    set.rows
}

/// Optimal symmetrizing cost and, when finite, an optimal kernel.
#[derive(Clone, Debug)]
pub struct SymCost {
    /// `+inf` when no kernel symmetrizes the channel at this arity.
    pub value: f64,
    pub arity: usize,
    nx: usize,
    ns: usize,
    kernel: Option<KernelTable>,
}

#[derive(Clone, Debug)]
enum KernelTable {
    ByType(TypeIndex, Vec<f64>),
    Full(Vec<f64>),
}

impl SymCost {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// The optimizing kernel as a full `U(s|x^m)` table.
    pub fn kernel(&self) -> Result<Option<ConditionalChannel>> {
        let ns = self.ns;
        let tidy = |row: &[f64]| -> Vec<f64> {
            let mut r: Vec<f64> = row.iter().map(|v| v.max(0.0)).collect();
            let sum: f64 = r.iter().sum();
            r.iter_mut().for_each(|v| *v /= sum);
            r
        };
        match &self.kernel {
            None => Ok(None),
            Some(KernelTable::ByType(types, table)) => {
                ConditionalChannel::from_fn(self.nx, ns, self.arity, |xs| {
                    let k = types.index_of_tuple(xs);
                    tidy(&table[k * ns..(k + 1) * ns])
                })
                .map(Some)
            }
            Some(KernelTable::Full(table)) => {
                let rows: Vec<f64> = table.chunks(ns).flat_map(tidy).collect();
                ConditionalChannel::new(self.nx, ns, self.arity, rows).map(Some)
            }
        }
    }

    fn infinite(avc: &Avc, m: usize) -> Self {
        SymCost {
            value: f64::INFINITY,
            arity: m,
            nx: avc.nx(),
            ns: avc.ns(),
            kernel: None,
        }
    }
}

fn check_inputs(avc: &Avc, p: &Dist, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidArgument("arity must be at least 1".into()));
    }
    if p.len() != avc.nx() {
        return Err(Error::Dimension(format!(
            "input distribution of length {} for {} inputs",
            p.len(),
            avc.nx()
        )));
    }
    Ok(())
}

fn exchangeable_cost(avc: &Avc, p: &Dist, m: usize, kind: CostKind) -> Result<SymCost> {
    let ns = avc.ns();
    let nx = avc.nx();
    let types = TypeIndex::new(nx, m);
    let nu = types.len() * ns;
    let n_vars = match kind {
        CostKind::Weak => nu,
        CostKind::Strong => nu + nx,
    };
    let mut c = vec![0.0; n_vars];
    if kind == CostKind::Weak {
        for k in 0..types.len() {
            let pk = types.iid_probability(k, p);
            for s in 0..ns {
                c[k * ns + s] = pk * avc.cost()[s];
            }
        }
    } else {
        for x in 0..nx {
            c[nu + x] = m as f64 * p[x];
        }
    }
    let mut lp = LinearProgram::new(c);
    for row in exchangeable_rows(avc, &types) {
        lp.add_eq_sparse(&row, 0.0);
    }
    for k in 0..types.len() {
        let row: Vec<(usize, f64)> = (0..ns).map(|s| (k * ns + s, 1.0)).collect();
        lp.add_eq_sparse(&row, 1.0);
    }
    if kind == CostKind::Strong {
        for x in 0..nx {
            lp.set_free(nu + x);
        }
        for k in 0..types.len() {
            let mut row: Vec<(usize, f64)> = (0..ns).map(|s| (k * ns + s, avc.cost()[s])).collect();
            for (x, &cx) in types.counts(k).iter().enumerate() {
                if cx > 0 {
                    row.push((nu + x, -(cx as f64)));
                }
            }
            lp.add_le_sparse(&row, 0.0);
        }
    }
    let sol = linprog::solve(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(SymCost::infinite(avc, m)),
        LpStatus::Unbounded => Err(Error::Lp {
            context: "symmetrizing cost",
            status: LpStatus::Unbounded,
        }),
        LpStatus::Optimal => Ok(SymCost {
            value: sol.objective_value.max(0.0),
            arity: m,
            nx,
            ns,
            kernel: Some(KernelTable::ByType(types, sol.z[..nu].to_vec())),
        }),
    }
}

fn full_cost(avc: &Avc, p: &Dist, m: usize, kind: CostKind) -> Result<SymCost> {
    let system = build_symmetry_constraints(avc, m)?;
    let (nx, ns) = (avc.nx(), avc.ns());
    let tuples = checked_pow(nx, m)?;
    let nu = tuples * ns;
    let n_vars = match kind {
        CostKind::Weak => nu,
        CostKind::Strong => nu + m * nx,
    };
    let mut c = vec![0.0; n_vars];
    match kind {
        CostKind::Weak => {
            for t in 0..tuples {
                let pt: f64 = tuple_digits(t, nx, m).iter().map(|&x| p[x]).product();
                for s in 0..ns {
                    c[t * ns + s] = pt * avc.cost()[s];
                }
            }
        }
        CostKind::Strong => {
            for i in 0..m {
                for x in 0..nx {
                    c[nu + i * nx + x] = p[x];
                }
            }
        }
    }
    let mut lp = LinearProgram::new(c);
    for row in system.rows() {
        lp.add_eq_sparse(row, 0.0);
    }
    for t in 0..tuples {
        let row: Vec<(usize, f64)> = (0..ns).map(|s| (t * ns + s, 1.0)).collect();
        lp.add_eq_sparse(&row, 1.0);
    }
    if kind == CostKind::Strong {
        for j in nu..n_vars {
            lp.set_free(j);
        }
        for t in 0..tuples {
            let mut row: Vec<(usize, f64)> = (0..ns).map(|s| (t * ns + s, avc.cost()[s])).collect();
            for (i, &x) in tuple_digits(t, nx, m).iter().enumerate() {
                row.push((nu + i * nx + x, -1.0));
            }
            lp.add_le_sparse(&row, 0.0);
        }
    }
    let sol = linprog::solve(&lp)?;
    match sol.status {
        LpStatus::Infeasible => Ok(SymCost::infinite(avc, m)),
        LpStatus::Unbounded => Err(Error::Lp {
            context: "symmetrizing cost (full)",
            status: LpStatus::Unbounded,
        }),
        LpStatus::Optimal => Ok(SymCost {
            value: sol.objective_value.max(0.0),
            arity: m,
            nx,
            ns,
            kernel: Some(KernelTable::Full(sol.z[..nu].to_vec())),
        }),
    }
}

/// Symmetrizing cost of the given kind with an explicit LP formulation.
pub fn symmetrizing_cost(
    avc: &Avc,
    p: &Dist,
    m: usize,
    kind: CostKind,
    formulation: Formulation,
) -> Result<SymCost> {
    check_inputs(avc, p, m)?;
    match formulation {
        Formulation::Exchangeable => exchangeable_cost(avc, p, m, kind),
        Formulation::Full => full_cost(avc, p, m, kind),
    }
}

/// Weak symmetrizing cost: cheapest symmetrizer when the `m` spoofing inputs
/// are i.i.d. with law `p`.
pub fn weak_cost(avc: &Avc, p: &Dist, m: usize) -> Result<SymCost> {
    symmetrizing_cost(avc, p, m, CostKind::Weak, Formulation::Exchangeable)
}

/// Strong symmetrizing cost: cheapest symmetrizer against the worst joint
/// input law whose marginals all equal `p`.
pub fn strong_cost(avc: &Avc, p: &Dist, m: usize) -> Result<SymCost> {
    symmetrizing_cost(avc, p, m, CostKind::Strong, Formulation::Exchangeable)
}

/// Source of symmetrizing costs `λ_m(P)` / `λ̃_m(P)`.
pub trait CostOracle: Sync {
    fn cost(&self, kind: CostKind, p: &Dist, m: usize) -> Result<f64>;
}

/// Costs computed by linear programming on a general AVC.
pub struct LpCosts<'a> {
    avc: &'a Avc,
}

impl<'a> LpCosts<'a> {
    pub fn new(avc: &'a Avc) -> Self {
        LpCosts { avc }
    }
}

impl CostOracle for LpCosts<'_> {
    fn cost(&self, kind: CostKind, p: &Dist, m: usize) -> Result<f64> {
        symmetrizing_cost(self.avc, p, m, kind, Formulation::Exchangeable).map(|c| c.value)
    }
}

type CostKey = (CostKind, Vec<u64>, usize);

/// Memoizes another oracle by exact input.
pub struct MemoCosts<O> {
    inner: O,
    cache: Mutex<HashMap<CostKey, f64>>,
}

impl<O: CostOracle> MemoCosts<O> {
    pub fn new(inner: O) -> Self {
        MemoCosts {
            inner,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl<O: CostOracle> CostOracle for MemoCosts<O> {
    fn cost(&self, kind: CostKind, p: &Dist, m: usize) -> Result<f64> {
        let key = (kind, p.as_slice().iter().map(|v| v.to_bits()).collect(), m);
        if let Some(&v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v);
        }
        let v = self.inner.cost(kind, p, m)?;
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

impl<T: CostOracle + ?Sized> CostOracle for &T {
    fn cost(&self, kind: CostKind, p: &Dist, m: usize) -> Result<f64> {
        (**self).cost(kind, p, m)
    }
}

/// Largest `m ≤ m_max` with cost below the budget.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    pub value: usize,
    /// The cost at `m_max` is still below budget, so the true threshold may be larger.
    pub saturated: bool,
    /// Some cost lies within [`THRESHOLD_MARGIN`] of the budget.
    pub tie: bool,
    /// Costs for `m = 1..=m_max`.
    pub costs: Vec<f64>,
}

pub(crate) fn below_budget(cost: f64, lambda: f64) -> bool {
    cost < lambda - THRESHOLD_MARGIN
}

pub(crate) fn near_budget(cost: f64, lambda: f64) -> bool {
    (cost - lambda).abs() <= THRESHOLD_MARGIN
}

/// Threshold from any cost oracle; scans every `m` in `1..=m_max`.
pub fn symmetrizability_with(
    oracle: &dyn CostOracle,
    kind: CostKind,
    p: &Dist,
    lambda: f64,
    m_max: usize,
) -> Result<Threshold> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("m_max must be at least 1".into()));
    }
    let costs = (1..=m_max)
        .map(|m| oracle.cost(kind, p, m))
        .collect::<Result<Vec<_>>>()?;
    let value = (1..=m_max)
        .filter(|&m| below_budget(costs[m - 1], lambda))
        .max()
        .unwrap_or(0);
    Ok(Threshold {
        value,
        saturated: value == m_max,
        tie: costs.iter().any(|&c| near_budget(c, lambda)),
        costs,
    })
}

pub fn weak_symmetrizability(avc: &Avc, p: &Dist, lambda: f64, m_max: usize) -> Result<Threshold> {
    check_inputs(avc, p, 1)?;
    symmetrizability_with(&LpCosts::new(avc), CostKind::Weak, p, lambda, m_max)
}

pub fn strong_symmetrizability(
    avc: &Avc,
    p: &Dist,
    lambda: f64,
    m_max: usize,
) -> Result<Threshold> {
    check_inputs(avc, p, 1)?;
    symmetrizability_with(&LpCosts::new(avc), CostKind::Strong, p, lambda, m_max)
}

//! Finite-alphabet probability objects: distributions, channels, AVCs and
//! conditional kernels over tuples of inputs.
//!
//! Tuples `(x_1, ..., x_m)` over an alphabet of size `k` are indexed
//! lexicographically with `x_1` as the most significant digit; see
//! [`tuple_index`] and [`tuple_digits`].

use crate::error::{Error, Result};

/// Tolerance on row sums for distributions, channels and AVCs.
pub const PROB_TOL: f64 = 1e-12;

/// Tolerance on row sums for conditional kernels and joint tables.
pub const KERNEL_TOL: f64 = 1e-10;

fn check_simplex(p: &[f64], tol: f64, what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    for (i, &v) in p.iter().enumerate() {
        if !v.is_finite() || v < 0.0 || v > 1.0 + tol {
            return Err(Error::InvalidDistribution(format!(
                "{what}: entry {i} = {v} is not a probability"
            )));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entries sum to {sum}"
        )));
    }
    Ok(())
}

/// Index of a tuple over an alphabet of size `k`.
pub fn tuple_index(xs: &[usize], k: usize) -> usize {
    xs.iter().fold(0, |acc, &x| acc * k + x)
}

/// Inverse of [`tuple_index`] for tuples of length `m`.
pub fn tuple_digits(mut idx: usize, k: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = idx % k;
        idx /= k;
    }
    out
}

/// `k^m`, or an error if it does not fit comfortably in memory-scale indices.
pub fn checked_pow(k: usize, m: usize) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..m {
        acc = acc
            .checked_mul(k)
            .filter(|&v| v <= 1 << 40)
            .ok_or_else(|| Error::TooLarge(format!("{k}^{m} tuples")))?;
    }
    Ok(acc)
}

/// A probability distribution over `{0, ..., len-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist(Vec<f64>);

impl Dist {
    /// Validates entries in `[0,1]` summing to one within [`PROB_TOL`].
    pub fn new(p: Vec<f64>) -> Result<Self> {
        check_simplex(&p, PROB_TOL, "distribution")?;
        Ok(Dist(p))
    }

    /// Clamps round-off negatives and divides by the sum. Only for vectors
    /// produced internally by convex combinations.
    pub(crate) fn from_weights(mut p: Vec<f64>) -> Self {
        for v in p.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = p.iter().sum();
        for v in p.iter_mut() {
            *v /= sum;
        }
        Dist(p)
    }

    pub fn uniform(k: usize) -> Self {
        Dist(vec![1.0 / k as f64; k])
    }

    pub fn point(k: usize, i: usize) -> Self {
        let mut p = vec![0.0; k];
        p[i] = 1.0;
        Dist(p)
    }

    /// Distribution on `{0,1}` with `P(1) = p1`.
    pub fn bernoulli(p1: f64) -> Result<Self> {
        Dist::new(vec![1.0 - p1, p1])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `(1 - t) * self + t * other`.
    pub fn mix(&self, other: &Dist, t: f64) -> Result<Dist> {
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "mixing distributions of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Dist::from_weights(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect(),
        ))
    }

    /// Expectation of `f` under this distribution.
    pub fn expect(&self, f: &[f64]) -> f64 {
        self.0.iter().zip(f).map(|(p, v)| p * v).sum()
    }
}

impl std::ops::Index<usize> for Dist {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A discrete memoryless channel `V(y|x)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    nx: usize,
    ny: usize,
    v: Vec<f64>,
}

impl Channel {
    pub fn new(nx: usize, ny: usize, v: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || v.len() != nx * ny {
            return Err(Error::Dimension(format!(
                "channel {nx}x{ny} with {} entries",
                v.len()
            )));
        }
        for x in 0..nx {
            check_simplex(
                &v[x * ny..(x + 1) * ny],
                PROB_TOL,
                &format!("channel row {x}"),
            )
            .map_err(|e| Error::InvalidChannel(e.to_string()))?;
        }
        Ok(Channel { nx, ny, v })
    }

    pub(crate) fn from_raw(nx: usize, ny: usize, v: Vec<f64>) -> Self {
        debug_assert_eq!(v.len(), nx * ny);
        Channel { nx, ny, v }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::Dimension("ragged channel rows".into()));
        }
        Channel::new(nx, ny, rows.concat())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.v[x * self.ny..(x + 1) * self.ny]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.v[x * self.ny + y]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.v
    }
}

/// An arbitrarily varying channel `W(y|x,s)` with per-state cost `l(s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Avc {
    nx: usize,
    ns: usize,
    ny: usize,
    w: Vec<f64>,
    cost: Vec<f64>,
}

impl Avc {
    /// `w` is indexed `[x][s][y]` in row-major order.
    pub fn new(nx: usize, ns: usize, ny: usize, w: Vec<f64>, cost: Vec<f64>) -> Result<Self> {
        if nx == 0 || ns == 0 || ny == 0 {
            return Err(Error::Dimension("alphabet sizes must be positive".into()));
        }
        if w.len() != nx * ns * ny {
            return Err(Error::Dimension(format!(
                "W has {} entries, expected {}",
                w.len(),
                nx * ns * ny
            )));
        }
        if cost.len() != ns {
            return Err(Error::Dimension(format!(
                "cost has {} entries, expected {ns}",
                cost.len()
            )));
        }
        for x in 0..nx {
            for s in 0..ns {
                let base = (x * ns + s) * ny;
                check_simplex(&w[base..base + ny], PROB_TOL, &format!("W[{x}][{s}]"))
                    .map_err(|e| Error::InvalidChannel(e.to_string()))?;
            }
        }
        for (s, &c) in cost.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidChannel(format!("cost[{s}] = {c}")));
            }
        }
        Ok(Avc {
            nx,
            ns,
            ny,
            w,
            cost,
        })
    }

    /// Builds from a nested `[x][s][y]` array.
    pub fn from_nested(w: &[Vec<Vec<f64>>], cost: Vec<f64>) -> Result<Self> {
        let nx = w.len();
        let ns = w.first().map_or(0, Vec::len);
        let ny = w.first().and_then(|r| r.first()).map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(nx * ns * ny);
        for (x, by_state) in w.iter().enumerate() {
            if by_state.len() != ns {
                return Err(Error::Dimension(format!(
                    "W[{x}] has {} states",
                    by_state.len()
                )));
            }
            for (s, row) in by_state.iter().enumerate() {
                if row.len() != ny {
                    return Err(Error::Dimension(format!(
                        "W[{x}][{s}] has {} outputs",
                        row.len()
                    )));
                }
                flat.extend_from_slice(row);
            }
        }
        Avc::new(nx, ns, ny, flat, cost)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn w(&self, x: usize, s: usize, y: usize) -> f64 {
        self.w[(x * self.ns + s) * self.ny + y]
    }

    /// `W(.|x,s)`.
    #[inline]
    pub fn w_row(&self, x: usize, s: usize) -> &[f64] {
        let base = (x * self.ns + s) * self.ny;
        &self.w[base..base + self.ny]
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn min_cost(&self) -> f64 {
        self.cost.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_cost(&self) -> f64 {
        self.cost.iter().copied().fold(0.0, f64::max)
    }

    /// The DMC obtained by fixing the state to `s`.
    pub fn state_channel(&self, s: usize) -> Channel {
        let mut v = Vec::with_capacity(self.nx * self.ny);
        for x in 0..self.nx {
            v.extend_from_slice(self.w_row(x, s));
        }
        Channel::from_raw(self.nx, self.ny, v)
    }

    /// Same channel law with the cost vector multiplied by `c`.
    pub fn with_cost(&self, cost: Vec<f64>) -> Result<Self> {
        Avc::new(self.nx, self.ns, self.ny, self.w.clone(), cost)
    }

    /// Nested `[x][s][y]` copy of `W`.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.nx)
            .map(|x| (0..self.ns).map(|s| self.w_row(x, s).to_vec()).collect())
            .collect()
    }
}

/// A kernel `U(s | x_1, ..., x_m)` from `m`-tuples of inputs to states.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalChannel {
    nx: usize,
    ns: usize,
    arity: usize,
    table: Vec<f64>,
}

impl ConditionalChannel {
    /// `table[tuple_index(x^m) * ns + s] = U(s | x^m)`.
    pub fn new(nx: usize, ns: usize, arity: usize, table: Vec<f64>) -> Result<Self> {
        let tuples = checked_pow(nx, arity)?;
        if table.len() != tuples * ns {
            return Err(Error::Dimension(format!(
                "kernel table has {} entries, expected {}",
                table.len(),
                tuples * ns
            )));
        }
        for t in 0..tuples {
            check_simplex(
                &table[t * ns..(t + 1) * ns],
                KERNEL_TOL,
                &format!("U(.|tuple {t})"),
            )?;
        }
        Ok(ConditionalChannel {
            nx,
            ns,
            arity,
            table,
        })
    }

    /// Builds `U(s|x^m) = f(x^m)[s]`.
    pub fn from_fn(
        nx: usize,
        ns: usize,
        arity: usize,
        mut f: impl FnMut(&[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let tuples = checked_pow(nx, arity)?;
        let mut table = Vec::with_capacity(tuples * ns);
        for t in 0..tuples {
            let row = f(&tuple_digits(t, nx, arity));
            if row.len() != ns {
                return Err(Error::Dimension(format!(
                    "kernel row of length {}",
                    row.len()
                )));
            }
            table.extend(row);
        }
        ConditionalChannel::new(nx, ns, arity, table)
    }

    /// Single-input kernel that ignores its input.
    pub fn constant(nx: usize, q: &Dist) -> Self {
        let table = (0..nx).flat_map(|_| q.as_slice().iter().copied()).collect();
        ConditionalChannel {
            nx,
            ns: q.len(),
            arity: 1,
            table,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn row(&self, tuple: usize) -> &[f64] {
        &self.table[tuple * self.ns..(tuple + 1) * self.ns]
    }

    pub fn row_for(&self, xs: &[usize]) -> &[f64] {
        self.row(tuple_index(xs, self.nx))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.table
    }
}

/// A joint distribution on `X^L`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    nx: usize,
    arity: usize,
    p: Vec<f64>,
}

impl JointDistribution {
    pub fn new(nx: usize, arity: usize, p: Vec<f64>) -> Result<Self> {
        let cells = checked_pow(nx, arity)?;
        if arity == 0 || p.len() != cells {
            return Err(Error::Dimension(format!(
                "joint table of length {} for {nx}^{arity} cells",
                p.len()
            )));
        }
        check_simplex(&p, KERNEL_TOL, "joint distribution")?;
        Ok(JointDistribution { nx, arity, p })
    }

    pub(crate) fn from_raw(nx: usize, arity: usize, p: Vec<f64>) -> Self {
        JointDistribution { nx, arity, p }
    }

    /// `P × P × ... × P`.
    pub fn product(p: &Dist, arity: usize) -> Result<Self> {
        let nx = p.len();
        let cells = checked_pow(nx, arity)?;
        let table = (0..cells)
            .map(|i| {
                tuple_digits(i, nx, arity)
                    .iter()
                    .map(|&x| p[x])
                    .product::<f64>()
            })
            .collect();
        Ok(JointDistribution::from_raw(nx, arity, table))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    /// Marginal of coordinate `i`.
    pub fn marginal(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.nx];
        let stride = self.nx.pow((self.arity - 1 - i) as u32);
        for (idx, &v) in self.p.iter().enumerate() {
            out[(idx / stride) % self.nx] += v;
        }
        out
    }

    /// Largest deviation of any marginal from `p`.
    pub fn max_marginal_deviation(&self, p: &Dist) -> f64 {
        (0..self.arity)
            .flat_map(|i| {
                self.marginal(i)
                    .into_iter()
                    .zip(p.as_slice())
                    .map(|(a, b)| (a - b).abs())
                    .collect::<Vec<_>>()
            })
            .fold(0.0, f64::max)
    }

    /// Sup-norm distance between two tables of the same shape.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

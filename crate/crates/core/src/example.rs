//! The additive channel `Y = X + S` with `X ∈ {0,1}`, `S ∈ {0..σ}` and
//! quadratic state cost `l(s) = s²`.
//!
//! A type-indexed kernel symmetrizes this channel at arity `m` exactly when
//! it is a shift `U(s | t) = q(s − t)` of the number `t` of ones among the
//! spoofing inputs, with `q` supported on `{0..σ−m}`. The costs then reduce
//! to small problems over `q` and over the law `τ` of `t`, computed here
//! independently of the general LP in [`crate::symmetry`].

use crate::capacity::{capacity_curve_with, CapacityCurvePoint, OuterOptions};
use crate::dist::{Avc, ConditionalChannel, Dist};
use crate::error::{Error, Result};
use crate::linprog::{self, LinearProgram, LpStatus};
use crate::symmetry::{CostKind, CostOracle, LpCosts, MemoCosts};

#[derive(Clone, Debug)]
pub struct AdditiveExample {
    sigma: usize,
    avc: Avc,
}

impl AdditiveExample {
    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn avc(&self) -> &Avc {
        &self.avc
    }

    pub fn into_avc(self) -> Avc {
        self.avc
    }
}

pub fn build_example(sigma: usize) -> Result<AdditiveExample> {
    if sigma == 0 {
        return Err(Error::InvalidArgument("sigma must be at least 1".into()));
    }
    let (nx, ns, ny) = (2, sigma + 1, sigma + 2);
    let mut w = vec![0.0; nx * ns * ny];
    for x in 0..nx {
        for s in 0..ns {
            w[(x * ns + s) * ny + x + s] = 1.0;
        }
    }
    let cost = (0..ns).map(|s| (s * s) as f64).collect();
    Ok(AdditiveExample {
        sigma,
        avc: Avc::new(nx, ns, ny, w, cost)?,
    })
}

/// Randomized-coding capacity without a state constraint, `−log2 cos(π/(σ+3))`.
pub fn unconstrained_capacity(sigma: usize) -> f64 {
    -(std::f64::consts::PI / (sigma as f64 + 3.0)).cos().log2()
}

/// A shift kernel `U(s | t) = q(s − t)` of arity `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftKernel {
    sigma: usize,
    arity: usize,
    q: Dist,
}

impl ShiftKernel {
    pub fn new(sigma: usize, arity: usize, q: Dist) -> Result<Self> {
        if arity == 0 || arity > sigma {
            return Err(Error::InvalidArgument(format!(
                "no shift kernel of arity {arity} for sigma {sigma}"
            )));
        }
        if q.len() != sigma - arity + 1 {
            return Err(Error::Dimension(format!(
                "offset law of length {} for sigma {sigma}, arity {arity}",
                q.len()
            )));
        }
        Ok(ShiftKernel { sigma, arity, q })
    }

    pub fn offsets(&self) -> &Dist {
        &self.q
    }

    pub fn to_conditional_channel(&self) -> Result<ConditionalChannel> {
        let ns = self.sigma + 1;
        ConditionalChannel::from_fn(2, ns, self.arity, |xs| {
            let t: usize = xs.iter().sum();
            let mut row = vec![0.0; ns];
            for (j, &qj) in self.q.as_slice().iter().enumerate() {
                row[j + t] = qj;
            }
            row
        })
    }
}

/// Law `τ` of the number of ones in a spoofing tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeDistribution {
    tau: Dist,
}

impl TypeDistribution {
    pub fn new(tau: Dist) -> Self {
        TypeDistribution { tau }
    }

    /// Binomial law of the count of ones among `arity` i.i.d. `Ber(p)` inputs.
    pub fn binomial(arity: usize, p: f64) -> Result<Self> {
        check_p(p)?;
        let mut tau = Vec::with_capacity(arity + 1);
        let mut coef = 1.0;
        for t in 0..=arity {
            if t > 0 {
                coef = coef * (arity + 1 - t) as f64 / t as f64;
            }
            tau.push(coef * p.powi(t as i32) * (1.0 - p).powi((arity - t) as i32));
        }
        Ok(TypeDistribution {
            tau: Dist::from_weights(tau),
        })
    }

    pub fn tau(&self) -> &Dist {
        &self.tau
    }

    pub fn mean(&self) -> f64 {
        self.tau
            .as_slice()
            .iter()
            .enumerate()
            .map(|(t, &v)| t as f64 * v)
            .sum()
    }

    /// `Σ_t τ(t) (j + t)²`.
    pub fn shifted_second_moment(&self, j: usize) -> f64 {
        self.tau
            .as_slice()
            .iter()
            .enumerate()
            .map(|(t, &v)| v * ((j + t) * (j + t)) as f64)
            .sum()
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("P(1) = {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_arity(arity: usize) -> Result<()> {
    if arity == 0 {
        return Err(Error::InvalidArgument("arity must be at least 1".into()));
    }
    Ok(())
}

/// Weak cost on the shift family: `min_q Σ_t Binom(L,p)(t) Σ_j q(j)(j+t)²`.
/// `+inf` when `σ < L`.
pub fn f_weak(sigma: usize, arity: usize, p: f64) -> Result<f64> {
    check_arity(arity)?;
    if arity > sigma {
        check_p(p)?;
        return Ok(f64::INFINITY);
    }
    let tau = TypeDistribution::binomial(arity, p)?;
    // a linear objective over the simplex of q is minimized at a vertex
    Ok((0..=sigma - arity)
        .map(|j| tau.shifted_second_moment(j))
        .fold(f64::INFINITY, f64::min))
}

/// Strong cost on the shift family:
/// `max_{τ : E τ = L p} min_q Σ_t τ(t) Σ_j q(j)(j+t)²`, solved as the LP
/// `max z` subject to `z ≤ Σ_t τ(t)(j+t)²` for every offset `j`.
pub fn g_strong(sigma: usize, arity: usize, p: f64) -> Result<f64> {
    g_strong_with_law(sigma, arity, p).map(|(v, _)| v)
}

/// [`g_strong`] together with a maximizing type law.
pub fn g_strong_with_law(
    sigma: usize,
    arity: usize,
    p: f64,
) -> Result<(f64, Option<TypeDistribution>)> {
    check_arity(arity)?;
    check_p(p)?;
    if arity > sigma {
        return Ok((f64::INFINITY, None));
    }
    // variables τ(0..=L), z (free)
    let z = arity + 1;
    let mut c = vec![0.0; arity + 2];
    c[z] = -1.0;
    let mut lp = LinearProgram::new(c);
    lp.set_free(z);
    lp.add_eq((0..=arity).map(|_| 1.0).chain([0.0]).collect(), 1.0);
    lp.add_eq(
        (0..=arity).map(|t| t as f64).chain([0.0]).collect(),
        arity as f64 * p,
    );
    for j in 0..=sigma - arity {
        let mut row: Vec<f64> = (0..=arity).map(|t| -(((j + t) * (j + t)) as f64)).collect();
        row.push(1.0);
        lp.add_le(row, 0.0);
    }
    let sol = linprog::solve(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp {
            context: "shift-family strong cost",
            status: sol.status,
        });
    }
    let tau = Dist::from_weights(sol.z[..=arity].to_vec());
    Ok((-sol.objective_value, Some(TypeDistribution::new(tau))))
}

/// Costs of the additive example from the shift-family reduction.
#[derive(Clone, Copy, Debug)]
pub struct ShiftCosts {
    pub sigma: usize,
}

impl CostOracle for ShiftCosts {
    fn cost(&self, kind: CostKind, p: &Dist, m: usize) -> Result<f64> {
        if p.len() != 2 {
            return Err(Error::Dimension(format!(
                "binary input expected, got {}",
                p.len()
            )));
        }
        match kind {
            CostKind::Weak => f_weak(self.sigma, m, p[1]),
            CostKind::Strong => g_strong(self.sigma, m, p[1]),
        }
    }
}

/// Tolerance for agreement between the general LP and the shift family.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

/// Compares two cost oracles at every binary grid point and every
/// `m ≤ m_max`, for both cost kinds.
pub fn cross_validate_costs(
    general: &dyn CostOracle,
    reduced: &dyn CostOracle,
    grid: usize,
    m_max: usize,
) -> Result<()> {
    for k in 0..grid {
        let p1 = k as f64 / (grid - 1) as f64;
        let p = Dist::from_weights(vec![1.0 - p1, p1]);
        for m in 1..=m_max {
            for kind in [CostKind::Weak, CostKind::Strong] {
                let a = general.cost(kind, &p, m)?;
                let b = reduced.cost(kind, &p, m)?;
                let agree = if a.is_infinite() || b.is_infinite() {
                    a == b
                } else {
                    (a - b).abs() <= CROSS_CHECK_TOL * a.abs().max(1.0)
                };
                if !agree {
                    return Err(Error::CrossCheck(format!(
                        "{kind:?} cost at P(1) = {p1}, m = {m}: LP {a} vs shift family {b}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Capacity and bound curves of the additive example, with the LP region
/// filters cross-validated against the shift-family costs at every grid point.
pub fn figure_data(
    sigma: usize,
    list_size: usize,
    lambda_grid: &[f64],
    grid: usize,
) -> Result<Vec<CapacityCurvePoint>> {
    let ex = build_example(sigma)?;
    let oracle = MemoCosts::new(LpCosts::new(ex.avc()));
    figure_data_with(
        &ex,
        &oracle,
        list_size,
        lambda_grid,
        OuterOptions {
            grid,
            ..Default::default()
        },
    )
}

/// As [`figure_data`] with a caller-provided (typically shared, memoized) LP oracle.
pub fn figure_data_with(
    ex: &AdditiveExample,
    oracle: &dyn CostOracle,
    list_size: usize,
    lambda_grid: &[f64],
    opts: OuterOptions,
) -> Result<Vec<CapacityCurvePoint>> {
    cross_validate_costs(
        oracle,
        &ShiftCosts { sigma: ex.sigma },
        opts.grid,
        opts.m_max,
    )?;
    capacity_curve_with(ex.avc(), oracle, list_size, lambda_grid, opts)
}

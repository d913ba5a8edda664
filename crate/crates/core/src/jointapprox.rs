//! Approximating a joint distribution on `X^L` by one whose marginals are all
//! exactly a target `P`.

use nalgebra::{DMatrix, DVector};

use crate::dist::{checked_pow, tuple_digits, tuple_index, Dist, JointDistribution};
use crate::error::{Error, Result};

fn check_shapes(pbar: &JointDistribution, p: &Dist) -> Result<()> {
    if pbar.nx() != p.len() {
        return Err(Error::Dimension(format!(
            "joint over {} symbols, target over {}",
            pbar.nx(),
            p.len()
        )));
    }
    Ok(())
}

/// Marginal constraint rows: total mass, then `P_i(a) = p(a)` for every
/// coordinate `i` and every symbol `a` but the last.
fn constraint_system(nx: usize, arity: usize, p: &Dist) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let cells = checked_pow(nx, arity)?;
    let rows = 1 + arity * (nx - 1);
    let mut a = DMatrix::<f64>::zeros(rows, cells);
    let mut b = DVector::<f64>::zeros(rows);
    b[0] = 1.0;
    for c in 0..cells {
        a[(0, c)] = 1.0;
        for (i, &x) in tuple_digits(c, nx, arity).iter().enumerate() {
            if x + 1 < nx {
                a[(1 + i * (nx - 1) + x, c)] = 1.0;
            }
        }
    }
    for i in 0..arity {
        for x in 0..nx - 1 {
            b[1 + i * (nx - 1) + x] = p[x];
        }
    }
    Ok((a, b))
}

/// Euclidean projection of `pbar` onto the affine set of tables with total
/// mass 1 and every marginal equal to `p`. Entries may be negative.
pub fn project_to_marginals(pbar: &JointDistribution, p: &Dist) -> Result<Vec<f64>> {
    check_shapes(pbar, p)?;
    let (a, b) = constraint_system(pbar.nx(), pbar.arity(), p)?;
    let z = DVector::from_column_slice(pbar.as_slice());
    let residual = &b - &a * &z;
    let gram = &a * a.transpose();
    let chol = gram.cholesky().ok_or(Error::RankDeficient)?;
    let out = z + a.transpose() * chol.solve(&residual);
    Ok(out.iter().copied().collect())
}

/// A distribution on `X^L` with every marginal equal to `p`, close to `pbar`.
///
/// Symbols outside the support of `p` are removed first. On the remaining
/// alphabet the projection is mixed with `p^L` using the smallest weight
/// that clears its negative entries.
pub fn approximate_joint(pbar: &JointDistribution, p: &Dist) -> Result<JointDistribution> {
    check_shapes(pbar, p)?;
    let (nx, arity) = (pbar.nx(), pbar.arity());
    let support: Vec<usize> = (0..nx).filter(|&x| p[x] > 0.0).collect();
    if support.len() < nx {
        return restrict_and_extend(pbar, p, &support);
    }
    let mut z = project_to_marginals(pbar, p)?;
    let product = JointDistribution::product(p, arity)?;
    let pi = product.as_slice();
    let alpha = z
        .iter()
        .zip(pi)
        .filter(|(&zk, _)| zk < 0.0)
        .map(|(&zk, &pk)| -zk / (pk - zk))
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0);
    if alpha > 0.0 {
        for (zk, &pk) in z.iter_mut().zip(pi) {
            *zk = ((1.0 - alpha) * *zk + alpha * pk).max(0.0);
        }
    }
    Ok(JointDistribution::from_raw(nx, arity, z))
}

fn restrict_and_extend(
    pbar: &JointDistribution,
    p: &Dist,
    support: &[usize],
) -> Result<JointDistribution> {
    let (nx, arity) = (pbar.nx(), pbar.arity());
    let k = support.len();
    let cells = checked_pow(nx, arity)?;
    let sub_p = Dist::new(support.iter().map(|&x| p[x]).collect())?;
    let sub_table: Vec<usize> = (0..checked_pow(k, arity)?)
        .map(|c| {
            let xs: Vec<usize> = tuple_digits(c, k, arity)
                .iter()
                .map(|&j| support[j])
                .collect();
            tuple_index(&xs, nx)
        })
        .collect();
    let sub = if k == 1 {
        vec![1.0]
    } else {
        let mass: f64 = sub_table.iter().map(|&c| pbar.as_slice()[c]).sum();
        let restricted = if mass > 0.0 {
            JointDistribution::from_raw(
                k,
                arity,
                sub_table
                    .iter()
                    .map(|&c| pbar.as_slice()[c] / mass)
                    .collect(),
            )
        } else {
            JointDistribution::product(&sub_p, arity)?
        };
        approximate_joint(&restricted, &sub_p)?.as_slice().to_vec()
    };
    let mut out = vec![0.0; cells];
    for (&c, v) in sub_table.iter().zip(sub) {
        out[c] = v;
    }
    Ok(JointDistribution::from_raw(nx, arity, out))
}

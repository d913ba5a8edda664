//! Exhaustive list decoding by typicality with an adversarial-state search.

use itertools::Itertools;

use super::{within_budget, Codebook};
use crate::dist::{tuple_index, Avc};
use crate::error::{Error, Result};
use crate::info::conditional_mutual_information;
use crate::types::empirical_joint_type;

/// Largest number of candidate state sequences examined per codeword.
pub const CANDIDATE_CAP: u64 = 531_441;

pub const MAX_CODEWORDS: usize = 32;

const ETA_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListDecoding {
    /// Decoded indices in increasing order, at most `L` of them.
    pub list: Vec<usize>,
    /// The rule accepted more than `L` indices; `list` keeps the smallest.
    pub over_list: bool,
    /// Every index accepted by the rule.
    pub accepted: Vec<usize>,
    /// Indices with at least one state sequence passing the typicality test.
    pub plausible: Vec<usize>,
}

/// `D(T_xsy ‖ T_x × T_s × W)` for the joint type of `(x, s, y)`.
fn typicality_divergence(avc: &Avc, x: &[usize], s: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let (nx, ns, ny) = (avc.nx(), avc.ns(), avc.ny());
    let mut tx = vec![0u32; nx];
    let mut ts = vec![0u32; ns];
    let mut keys: Vec<usize> = Vec::with_capacity(x.len());
    for t in 0..x.len() {
        tx[x[t]] += 1;
        ts[s[t]] += 1;
        keys.push((x[t] * ns + s[t]) * ny + y[t]);
    }
    keys.sort_unstable();
    let mut d = 0.0;
    for run in keys.chunk_by(|a, b| a == b) {
        let k = run[0];
        let (xx, ss, yy) = (k / (ns * ny), (k / ny) % ns, k % ny);
        let joint = run.len() as f64 / n;
        let reference = tx[xx] as f64 / n * ts[ss] as f64 / n * avc.w(xx, ss, yy);
        if reference <= 0.0 {
            return f64::INFINITY;
        }
        d += joint * (joint / reference).log2();
    }
    d.max(0.0)
}

/// State sequences within budget whose joint type with `(x, y)` lies in
/// `G_η(Λ)`.
fn explanations(
    avc: &Avc,
    x: &[usize],
    y: &[usize],
    lambda: f64,
    eta: f64,
) -> Result<Vec<Vec<usize>>> {
    let n = x.len();
    let cost = avc.cost();
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|t| {
            (0..avc.ns())
                .filter(|&s| avc.w(x[t], s, y[t]) > 0.0)
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let product = candidates
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .filter(|&p| p <= CANDIDATE_CAP);
    if product.is_none() {
        return Err(Error::TooLarge(format!(
            "more than {CANDIDATE_CAP} candidate state sequences"
        )));
    }
    // cheapest completion from position t onwards, for pruning
    let mut tail = vec![0.0; n + 1];
    for t in (0..n).rev() {
        let cheapest = candidates[t]
            .iter()
            .map(|&s| cost[s])
            .fold(f64::INFINITY, f64::min);
        tail[t] = tail[t + 1] + cheapest;
    }
    let mut found = Vec::new();
    let mut s = vec![0usize; n];
    let mut choice = vec![0usize; n];
    let mut spent = vec![0.0; n + 1];
    let mut t = 0usize;
    loop {
        if t == n {
            if within_budget(spent[n], n, lambda)
                && typicality_divergence(avc, x, &s, y) <= eta + ETA_SLACK
            {
                found.push(s.clone());
            }
        } else if choice[t] < candidates[t].len() {
            let st = candidates[t][choice[t]];
            choice[t] += 1;
            s[t] = st;
            spent[t + 1] = spent[t] + cost[st];
            if within_budget(spent[t + 1] + tail[t + 1], n, lambda) {
                t += 1;
            }
            continue;
        }
        if t == n {
            t -= 1;
            continue;
        }
        choice[t] = 0;
        if t == 0 {
            return Ok(found);
        }
        t -= 1;
    }
}

/// `I(Y X_i ; X_J | S)` for the joint type of `(y, x_i, x_J, s)`.
fn spoofing_information(
    avc: &Avc,
    codebook: &Codebook,
    y: &[usize],
    i: usize,
    jammers: &[usize],
    s: &[usize],
) -> Result<f64> {
    let nx = avc.nx();
    let a: Vec<usize> = y
        .iter()
        .zip(codebook.codeword(i))
        .map(|(&yt, &xt)| yt * nx + xt)
        .collect();
    let mut xs = vec![0; jammers.len()];
    let b: Vec<usize> = (0..y.len())
        .map(|t| {
            for (slot, &j) in xs.iter_mut().zip(jammers) {
                *slot = codebook.codeword(j)[t];
            }
            tuple_index(&xs, nx)
        })
        .collect();
    let dims = [avc.ny() * nx, nx.pow(jammers.len() as u32), avc.ns()];
    conditional_mutual_information(&empirical_joint_type(&dims, &[&a, &b, s])?)
}

/// Decodes `y` to a list of at most `list_size` codeword indices.
///
/// Index `i` is accepted when some budget-feasible `s` makes
/// `(x_i, s, y)` typical and, with that same `s`, every set of `L` other
/// plausible codewords carries at most `η` bits about `(y, x_i)` given `s`.
pub fn decode_list(
    avc: &Avc,
    codebook: &Codebook,
    y: &[usize],
    lambda: f64,
    eta: f64,
    list_size: usize,
) -> Result<ListDecoding> {
    if codebook.nx() != avc.nx() {
        return Err(Error::Dimension(
            "codebook and channel input alphabets differ".into(),
        ));
    }
    if y.len() != codebook.n() {
        return Err(Error::Dimension(format!(
            "output of length {} for blocklength {}",
            y.len(),
            codebook.n()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&v| v >= avc.ny()) {
        return Err(Error::InvalidArgument(format!(
            "output symbol {bad} out of range"
        )));
    }
    if codebook.len() > MAX_CODEWORDS {
        return Err(Error::TooLarge(format!(
            "{} codewords; exhaustive decoding supports at most {MAX_CODEWORDS}",
            codebook.len()
        )));
    }
    if list_size == 0 || !(eta >= 0.0) {
        return Err(Error::InvalidArgument(
            "list size must be positive and eta nonnegative".into(),
        ));
    }
    let good: Vec<Vec<Vec<usize>>> = (0..codebook.len())
        .map(|i| explanations(avc, codebook.codeword(i), y, lambda, eta))
        .collect::<Result<_>>()?;
    let plausible: Vec<usize> = (0..codebook.len())
        .filter(|&i| !good[i].is_empty())
        .collect();
    let mut accepted = Vec::new();
    for &i in &plausible {
        let others: Vec<usize> = plausible.iter().copied().filter(|&j| j != i).collect();
        let mut ok = false;
        for s in &good[i] {
            let mut all = true;
            for jammers in others.iter().copied().combinations(list_size) {
                if spoofing_information(avc, codebook, y, i, &jammers, s)? > eta + ETA_SLACK {
                    all = false;
                    break;
                }
            }
            if all {
                ok = true;
                break;
            }
        }
        if ok {
            accepted.push(i);
        }
    }
    let over_list = accepted.len() > list_size;
    Ok(ListDecoding {
        list: accepted.iter().copied().take(list_size).collect(),
        over_list,
        accepted,
        plausible,
    })
}

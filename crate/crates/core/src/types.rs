//! Joint types (empirical compositions) of aligned symbol sequences.

use crate::error::{Error, Result};

/// Counts of aligned tuples over a product alphabet `dims[0] × dims[1] × ...`.
///
/// Only occupied cells are stored, keyed by the mixed-radix index of the
/// tuple, so sparse types over large product alphabets stay cheap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointType {
    dims: Vec<usize>,
    cells: Vec<(u64, u64)>,
    n: u64,
}

fn encode(dims: &[usize], symbols: impl Iterator<Item = usize>) -> u64 {
    symbols
        .zip(dims)
        .fold(0u64, |acc, (s, &d)| acc * d as u64 + s as u64)
}

fn decode(dims: &[usize], mut key: u64) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = (key % d as u64) as usize;
        key /= d as u64;
    }
    out
}

fn count_sorted(mut keys: Vec<u64>) -> Vec<(u64, u64)> {
    keys.sort_unstable();
    let mut cells: Vec<(u64, u64)> = Vec::new();
    for k in keys {
        match cells.last_mut() {
            Some((last, c)) if *last == k => *c += 1,
            _ => cells.push((k, 1)),
        }
    }
    cells
}

impl JointType {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Blocklength.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Occupied cells as `(tuple, count)`.
    pub fn cells(&self) -> impl Iterator<Item = (Vec<usize>, u64)> + '_ {
        self.cells.iter().map(|&(k, c)| (decode(&self.dims, k), c))
    }

    pub fn count(&self, tuple: &[usize]) -> u64 {
        let key = encode(&self.dims, tuple.iter().copied());
        self.cells
            .binary_search_by_key(&key, |&(k, _)| k)
            .map_or(0, |i| self.cells[i].1)
    }

    /// Induced probability of a tuple.
    pub fn prob(&self, tuple: &[usize]) -> f64 {
        self.count(tuple) as f64 / self.n as f64
    }

    /// Joint type of the selected coordinates, in the given order.
    pub fn marginal(&self, coords: &[usize]) -> JointType {
        let dims: Vec<usize> = coords.iter().map(|&c| self.dims[c]).collect();
        let mut keyed: Vec<(u64, u64)> = self
            .cells
            .iter()
            .map(|&(k, c)| {
                let t = decode(&self.dims, k);
                (encode(&dims, coords.iter().map(|&i| t[i])), c)
            })
            .collect();
        keyed.sort_unstable();
        let mut cells: Vec<(u64, u64)> = Vec::new();
        for (k, c) in keyed {
            match cells.last_mut() {
                Some((last, acc)) if *last == k => *acc += c,
                _ => cells.push((k, c)),
            }
        }
        JointType {
            dims,
            cells,
            n: self.n,
        }
    }

    /// Entropy in bits of the induced distribution.
    pub fn entropy(&self) -> f64 {
        let n = self.n as f64;
        self.cells
            .iter()
            .map(|&(_, c)| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum()
    }
}

/// Counts the aligned tuples `(seq_0[t], seq_1[t], ...)` for `t < n`.
///
/// `dims[k]` is the alphabet size of sequence `k`.
pub fn empirical_joint_type(dims: &[usize], sequences: &[&[usize]]) -> Result<JointType> {
    if dims.len() != sequences.len() || dims.is_empty() {
        return Err(Error::Dimension(format!(
            "{} alphabets for {} sequences",
            dims.len(),
            sequences.len()
        )));
    }
    let n = sequences[0].len();
    if sequences.iter().any(|s| s.len() != n) {
        return Err(Error::Dimension("sequences have unequal lengths".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty sequences".into()));
    }
    let cells: u128 = dims.iter().map(|&d| d as u128).product();
    if dims.contains(&0) || cells > u64::MAX as u128 / 2 {
        return Err(Error::TooLarge(format!("product alphabet {dims:?}")));
    }
    for (k, seq) in sequences.iter().enumerate() {
        if let Some(&bad) = seq.iter().find(|&&s| s >= dims[k]) {
            return Err(Error::InvalidArgument(format!(
                "symbol {bad} in sequence {k} exceeds alphabet size {}",
                dims[k]
            )));
        }
    }
    let keys = (0..n)
        .map(|t| encode(dims, sequences.iter().map(|s| s[t])))
        .collect();
    Ok(JointType {
        dims: dims.to_vec(),
        cells: count_sorted(keys),
        n: n as u64,
    })
}

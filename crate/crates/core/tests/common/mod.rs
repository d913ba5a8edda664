#![allow(dead_code)]

use avc_list::info::{compose_state, mutual_information};
use avc_list::linprog::LinearProgram;
use avc_list::{Avc, Channel, ConditionalChannel, Dist};
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalizes positive weights into a distribution.
pub fn normalize(w: &[f64]) -> Dist {
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / total).collect();
    let rest: f64 = p[1..].iter().sum();
    p[0] = 1.0 - rest;
    Dist::new(p).unwrap()
}

pub fn random_dist(rng: &mut impl Rng, k: usize) -> Dist {
    let w: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    normalize(&w)
}

pub fn random_avc(rng: &mut impl Rng, nx: usize, ns: usize, ny: usize, cost: Vec<f64>) -> Avc {
    let w: Vec<Vec<Vec<f64>>> = (0..nx)
        .map(|_| (0..ns).map(|_| random_dist(rng, ny).into_vec()).collect())
        .collect();
    Avc::from_nested(&w, cost).unwrap()
}

pub fn random_kernel(rng: &mut impl Rng, nx: usize, ns: usize, arity: usize) -> ConditionalChannel {
    ConditionalChannel::from_fn(nx, ns, arity, |_| random_dist(rng, ns).into_vec()).unwrap()
}

/// Parses `key value` lines of CLI output.
pub fn field<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
}

pub fn info_at_q(avc: &Avc, p: &Dist, q1: f64) -> f64 {
    let q = Dist::new(vec![1.0 - q1, q1]).unwrap();
    mutual_information(p, &compose_state(avc, &q).unwrap()).unwrap()
}

pub fn info_at_u(avc: &Avc, p: &Dist, a: f64, b: f64) -> f64 {
    // U(1|0) = a, U(1|1) = b
    let u = [a, b];
    let mut v = Vec::with_capacity(4);
    for (x, &ux) in u.iter().enumerate() {
        for y in 0..2 {
            v.push((1.0 - ux) * avc.w(x, 0, y) + ux * avc.w(x, 1, y));
        }
    }
    mutual_information(p, &Channel::new(2, 2, v).unwrap()).unwrap()
}

/// Dense scan of `[lo, hi]` followed by repeated zooming around the best point.
pub fn grid_min_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let mut best = f64::INFINITY;
    for _ in 0..6 {
        let k = 200;
        let step = (hi - lo) / k as f64;
        let mut arg = lo;
        for i in 0..=k {
            let t = lo + step * i as f64;
            let v = f(t);
            if v < best {
                best = v;
                arg = t;
            }
        }
        let (a, b) = ((arg - 2.0 * step).max(lo), (arg + 2.0 * step).min(hi));
        lo = a;
        hi = b;
    }
    best
}

pub fn grid_min_2d(f: impl Fn(f64, f64) -> f64, feasible: impl Fn(f64, f64) -> bool) -> f64 {
    let (mut box_a, mut box_b) = ((0.0, 1.0), (0.0, 1.0));
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let k = 120;
        let (sa, sb) = (
            (box_a.1 - box_a.0) / k as f64,
            (box_b.1 - box_b.0) / k as f64,
        );
        let mut arg = (box_a.0, box_b.0);
        for i in 0..=k {
            for j in 0..=k {
                let (a, b) = (box_a.0 + sa * i as f64, box_b.0 + sb * j as f64);
                if !feasible(a, b) {
                    continue;
                }
                let v = f(a, b);
                if v < best {
                    best = v;
                    arg = (a, b);
                }
            }
        }
        box_a = ((arg.0 - 2.0 * sa).max(0.0), (arg.0 + 2.0 * sa).min(1.0));
        box_b = ((arg.1 - 2.0 * sb).max(0.0), (arg.1 + 2.0 * sb).min(1.0));
    }
    best
}

/// Small random LP: box-bounded `≤` rows and an optional equality.
pub struct Instance {
    pub c: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub le: Vec<(Vec<f64>, f64)>,
}

impl Instance {
    pub fn random(rng: &mut impl Rng) -> Self {
        let n = rng.gen_range(2..=6);
        let c = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut le: Vec<(Vec<f64>, f64)> = (0..rng.gen_range(1..=4))
            .map(|_| {
                (
                    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    rng.gen_range(0.5..2.0),
                )
            })
            .collect();
        // a box keeps every instance bounded
        for j in 0..n {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            le.push((row, rng.gen_range(1.0..3.0)));
        }
        let eq = if rng.gen_bool(0.5) {
            vec![(
                (0..n).map(|_| rng.gen_range(0.1..1.0)).collect(),
                rng.gen_range(0.2..1.0),
            )]
        } else {
            Vec::new()
        };
        Instance { c, eq, le }
    }

    pub fn lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(self.c.clone());
        for (row, b) in &self.eq {
            lp.add_eq(row.clone(), *b);
        }
        for (row, b) in &self.le {
            lp.add_le(row.clone(), *b);
        }
        lp
    }

    pub fn feasible(&self, z: &[f64], tol: f64) -> bool {
        let dot = |r: &[f64]| r.iter().zip(z).map(|(a, b)| a * b).sum::<f64>();
        z.iter().all(|&v| v >= -tol)
            && self.eq.iter().all(|(r, b)| (dot(r) - b).abs() <= tol)
            && self.le.iter().all(|(r, b)| dot(r) <= b + tol)
    }

    /// Minimum over all basic feasible points.
    pub fn vertex_minimum(&self) -> Option<f64> {
        let n = self.c.len();
        let mut ineq: Vec<(Vec<f64>, f64)> = self.le.clone();
        for j in 0..n {
            let mut row = vec![0.0; n];
            row[j] = -1.0;
            ineq.push((row, 0.0));
        }
        let need = n - self.eq.len();
        let mut best: Option<f64> = None;
        for active in (0..ineq.len()).combinations(need) {
            let rows: Vec<&(Vec<f64>, f64)> = self
                .eq
                .iter()
                .chain(active.iter().map(|&k| &ineq[k]))
                .collect();
            let a = DMatrix::from_fn(n, n, |i, j| rows[i].0[j]);
            let b = DVector::from_fn(n, |i, _| rows[i].1);
            let Some(z) = a.lu().solve(&b) else { continue };
            let z: Vec<f64> = z.iter().copied().collect();
            if z.iter().any(|v| !v.is_finite()) || !self.feasible(&z, 1e-9) {
                continue;
            }
            let v: f64 = self.c.iter().zip(&z).map(|(a, b)| a * b).sum();
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
        best
    }
}

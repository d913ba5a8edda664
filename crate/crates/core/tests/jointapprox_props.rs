mod common;

use avc_list::jointapprox::{approximate_joint, project_to_marginals};
use avc_list::{Dist, JointDistribution};
use common::{normalize, random_dist, rng};
use proptest::prelude::*;
use rand::Rng;

fn random_joint(r: &mut impl Rng, nx: usize, arity: usize) -> JointDistribution {
    let cells = nx.pow(arity as u32);
    JointDistribution::new(nx, arity, random_dist(r, cells).into_vec()).unwrap()
}

fn sparse_target(r: &mut impl Rng, nx: usize) -> Dist {
    let mut w: Vec<f64> = (0..nx).map(|_| r.gen::<f64>() + 0.05).collect();
    let zero = r.gen_range(0..nx);
    w[zero] = 0.0;
    if r.gen_bool(0.3) {
        w[(zero + 1) % nx] = 0.0;
    }
    if w.iter().all(|&v| v == 0.0) {
        w[0] = 1.0;
    }
    normalize_allow_zero(&w)
}

fn normalize_allow_zero(w: &[f64]) -> Dist {
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|v| v / total).collect();
    let k = p.iter().position(|&v| v > 0.0).unwrap();
    let rest: f64 = p
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, v)| v)
        .sum();
    p[k] = 1.0 - rest;
    Dist::new(p).unwrap()
}

fn check(out: &JointDistribution, p: &Dist) {
    assert!(
        out.max_marginal_deviation(p) <= 1e-12,
        "{}",
        out.max_marginal_deviation(p)
    );
    assert!((out.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    assert!(out.as_slice().iter().all(|&v| v >= 0.0));
}

#[test]
fn random_pairs_have_exact_marginals() {
    let mut r = rng(31);
    for k in 0..100 {
        let nx = r.gen_range(2..=4);
        let arity = r.gen_range(1..=3);
        let pbar = random_joint(&mut r, nx, arity);
        let p = if k % 3 == 0 {
            sparse_target(&mut r, nx)
        } else {
            random_dist(&mut r, nx)
        };
        check(&approximate_joint(&pbar, &p).unwrap(), &p);
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

#[test]
fn distance_shrinks_with_marginal_error() {
    let mut r = rng(32);
    let cases: Vec<(Dist, JointDistribution, JointDistribution)> = (0..100)
        .map(|_| {
            let p = random_dist(&mut r, 3);
            let exact = approximate_joint(&random_joint(&mut r, 3, 2), &p).unwrap();
            (p, exact, random_joint(&mut r, 3, 2))
        })
        .collect();
    let mut medians = Vec::new();
    for delta in [1e-1, 1e-2, 1e-3] {
        let dists: Vec<f64> = cases
            .iter()
            .map(|(p, exact, noise)| {
                let mixed: Vec<f64> = exact
                    .as_slice()
                    .iter()
                    .zip(noise.as_slice())
                    .map(|(a, b)| (1.0 - delta) * a + delta * b)
                    .collect();
                let pbar = JointDistribution::new(3, 2, mixed).unwrap();
                approximate_joint(&pbar, p).unwrap().max_abs_diff(&pbar)
            })
            .collect();
        medians.push(median(dists));
    }
    assert!(
        medians[0] > medians[1] && medians[1] > medians[2],
        "{medians:?}"
    );
    assert!(medians[2] < 1e-2);
}

#[test]
fn product_retargeted_to_uniform() {
    let pbar = JointDistribution::product(&Dist::bernoulli(0.4).unwrap(), 2).unwrap();
    let p = Dist::bernoulli(0.5).unwrap();
    let z = project_to_marginals(&pbar, &p).unwrap();
    let expected = [0.26, 0.24, 0.24, 0.26];
    for (a, b) in z.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12, "{z:?}");
    }
    let out = approximate_joint(&pbar, &p).unwrap();
    for (a, b) in out.as_slice().iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn marginals_always_exact(
        weights in prop::collection::vec(0.01f64..1.0, 8),
        target in prop::collection::vec(0.0f64..1.0, 2),
    ) {
        let pbar = JointDistribution::new(2, 3, normalize(&weights).into_vec()).unwrap();
        let p = if target.iter().sum::<f64>() > 0.0 {
            normalize_allow_zero(&target)
        } else {
            Dist::uniform(2)
        };
        let out = approximate_joint(&pbar, &p).unwrap();
        prop_assert!(out.max_marginal_deviation(&p) <= 1e-12);
        prop_assert!(out.as_slice().iter().all(|&v| v >= 0.0));
    }
}

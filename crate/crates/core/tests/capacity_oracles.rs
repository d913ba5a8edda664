mod common;

use avc_list::capacity::{
    achievable_bound, c_dep, c_std, capacity_curve, converse_bound, min_info_over_dependent_states,
    min_info_over_states, GAP_TOL,
};
use avc_list::example::build_example;
use avc_list::info::{compose_state, mutual_information, state_gradient};
use avc_list::{Avc, Dist};
use common::{grid_min_1d, grid_min_2d, info_at_q, info_at_u, random_avc, random_dist, rng};
use rand::Rng;

fn unit_cost_avc(r: &mut impl Rng) -> Avc {
    random_avc(r, 2, 2, 2, vec![0.0, 1.0])
}

#[test]
fn gradient_matches_finite_differences() {
    let mut r = rng(21);
    let h = 1e-6;
    for _ in 0..20 {
        let avc = random_avc(&mut r, 3, 3, 3, vec![0.0, 1.0, 2.0]);
        let p = random_dist(&mut r, 3);
        let q = random_dist(&mut r, 3);
        let g = state_gradient(&avc, &p, &q).unwrap();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let shifted = |t: f64| {
                let mut v = q.as_slice().to_vec();
                v[a] += t;
                v[b] -= t;
                let qt = Dist::new(v).unwrap();
                mutual_information(&p, &compose_state(&avc, &qt).unwrap()).unwrap()
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let exact = g[a] - g[b];
            assert!(
                (fd - exact).abs() <= 1e-5 * exact.abs().max(1.0),
                "fd {fd} vs {exact}"
            );
        }
    }
}

#[test]
fn state_minimum_matches_grid() {
    let mut r = rng(22);
    for _ in 0..50 {
        let avc = unit_cost_avc(&mut r);
        let p = random_dist(&mut r, 2);
        let lambda = r.gen_range(0.05..1.2);
        let res = min_info_over_states(&avc, &p, lambda).unwrap();
        let oracle = grid_min_1d(|q1| info_at_q(&avc, &p, q1), 0.0, lambda.min(1.0));
        assert!(
            (res.value - oracle).abs() < 1e-4,
            "{} vs {oracle}",
            res.value
        );
        assert!(res.value >= oracle - 1e-4);
        assert!(res.duality_gap <= GAP_TOL);
    }
}

#[test]
fn dependent_minimum_matches_grid() {
    let mut r = rng(23);
    for _ in 0..50 {
        let avc = unit_cost_avc(&mut r);
        let p = random_dist(&mut r, 2);
        let lambda = r.gen_range(0.05..1.2);
        let res = min_info_over_dependent_states(&avc, &p, lambda).unwrap();
        let oracle = grid_min_2d(
            |a, b| info_at_u(&avc, &p, a, b),
            |a, b| p[0] * a + p[1] * b <= lambda,
        );
        assert!(
            (res.value - oracle).abs() < 1e-4,
            "{} vs {oracle}",
            res.value
        );
        assert!(res.duality_gap <= GAP_TOL);
        let std = min_info_over_states(&avc, &p, lambda).unwrap().value;
        assert!(res.value <= std + 1e-7);
    }
}

#[test]
fn capacity_nonincreasing_in_budget() {
    let mut r = rng(24);
    for _ in 0..5 {
        let avc = random_avc(&mut r, 2, 3, 3, vec![0.0, 1.0, 3.0]);
        let mut prev = f64::INFINITY;
        for lambda in [0.0, 0.25, 0.5, 1.0, 2.0, 3.0] {
            let (c, _) = c_std(&avc, lambda, 201).unwrap();
            assert!(c <= prev + 1e-7);
            let (d, _) = c_dep(&avc, lambda, 201).unwrap();
            assert!(d <= c + 1e-7);
            prev = c;
        }
    }
}

#[test]
fn example_curve_orderings() {
    let ex = build_example(8).unwrap();
    let grid: Vec<f64> = (0..=16).map(|k| k as f64 * 0.5).collect();
    let curve = capacity_curve(ex.avc(), 2, &grid, 201).unwrap();
    for w in curve.windows(2) {
        assert!(w[1].c_r <= w[0].c_r + 1e-7);
    }
    for pt in &curve {
        assert!(pt.converse >= pt.achievable - 1e-7, "Λ={}", pt.lambda);
        assert!(pt.c_r >= pt.converse - 1e-7);
        assert!(!pt.achievable_empty || pt.achievable == 0.0);
        assert!(pt.achievable_empty >= pt.converse_empty);
    }
}

#[test]
fn list_size_beyond_sigma_is_unrestricted() {
    let ex = build_example(8).unwrap();
    for lambda in [1.0, 3.0, 6.0] {
        let (c, _) = c_std(ex.avc(), lambda, 201).unwrap();
        let a = achievable_bound(ex.avc(), lambda, 9, 201).unwrap();
        assert!(!a.empty_region);
        assert!((a.value - c).abs() < 1e-9);
    }
}

#[test]
fn unit_list_converse_region_empty() {
    let ex = build_example(8).unwrap();
    let b = converse_bound(ex.avc(), 3.0, 1, 201).unwrap();
    assert!(b.empty_region);
    assert_eq!(b.value, 0.0);
    assert!(b.p.is_none());
}

mod common;

use avc_list::linprog::{solve, LinearProgram, LpStatus};
use common::Instance;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn matches_vertex_enumeration() {
    let mut rng = common::rng(2024);
    let mut checked = 0;
    while checked < 50 {
        let inst = Instance::random(&mut rng);
        let Some(oracle) = inst.vertex_minimum() else {
            continue;
        };
        let sol = solve(&inst.lp()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(
            (sol.objective_value - oracle).abs() <= 1e-8,
            "{} vs {oracle}",
            sol.objective_value
        );
        assert!(inst.feasible(&sol.z, 1e-8));
        assert!(sol.certificate_violation(&inst.lp()) <= 1e-8);
        checked += 1;
    }
}

#[test]
fn classifies_constructed_cases() {
    let mut lp = LinearProgram::new(vec![1.0, 1.0]);
    lp.add_le(vec![1.0, 1.0], 1.0);
    lp.add_ge(vec![1.0, 1.0], 2.0);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);

    let mut lp = LinearProgram::new(vec![0.0, 0.0, 0.0]);
    lp.add_eq(vec![1.0, 1.0, 1.0], 1.0);
    lp.add_eq(vec![1.0, 1.0, 1.0], 2.0);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);

    let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
    lp.add_le(vec![1.0, -1.0], 1.0);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);

    let mut lp = LinearProgram::new(vec![1.0]);
    lp.set_free(0);
    lp.add_le(vec![1.0], 4.0);
    assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
}

proptest! {
    #[test]
    fn permutation_invariance(seed in any::<u64>(), shift in 1usize..6) {
        let mut rng = common::rng(seed);
        let inst = Instance::random(&mut rng);
        let n = inst.c.len();
        let perm: Vec<usize> = (0..n).map(|j| (j + shift) % n).collect();
        let permute = |v: &[f64]| -> Vec<f64> { perm.iter().map(|&j| v[j]).collect() };
        let permuted = Instance {
            c: permute(&inst.c),
            eq: inst.eq.iter().map(|(r, b)| (permute(r), *b)).collect(),
            le: inst.le.iter().map(|(r, b)| (permute(r), *b)).collect(),
        };
        let a = solve(&inst.lp()).unwrap();
        let b = solve(&permuted.lp()).unwrap();
        prop_assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            prop_assert!((a.objective_value - b.objective_value).abs() <= 1e-8);
        }
    }

    #[test]
    fn dual_value_bounds_feasible_points(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = common::rng(seed);
        let inst = Instance::random(&mut rng);
        let lp = inst.lp();
        let sol = solve(&lp).unwrap();
        prop_assume!(sol.status == LpStatus::Optimal);
        let dual: f64 = inst.eq.iter().map(|(_, b)| b).zip(&sol.duals_eq).map(|(b, y)| b * y).sum::<f64>()
            + inst.le.iter().map(|(_, b)| b).zip(&sol.duals_le).map(|(b, y)| b * y).sum::<f64>();
        // points on the segment from the optimum towards a random feasible point
        let other: Vec<f64> = (0..inst.c.len()).map(|_| rng.gen_range(0.0..0.3)).collect();
        let z: Vec<f64> = sol.z.iter().zip(&other).map(|(a, b)| (1.0 - t) * a + t * b).collect();
        if inst.feasible(&z, 0.0) {
            prop_assert!(dual <= lp.evaluate(&z) + 1e-9);
        }
        prop_assert!(dual <= sol.objective_value + 1e-9);
    }
}

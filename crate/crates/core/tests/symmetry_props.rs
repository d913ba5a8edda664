mod common;

use avc_list::capacity::min_info_over_states;
use avc_list::dist::{tuple_digits, tuple_index};
use avc_list::example::{build_example, f_weak, g_strong, ShiftKernel};
use avc_list::symmetry::{
    build_symmetry_constraints, strong_cost, strong_symmetrizability, symmetrizing_cost, weak_cost,
    weak_symmetrizability, CostKind, Formulation,
};
use avc_list::{Avc, ConditionalChannel, Dist};
use common::{random_avc, random_dist, random_kernel, rng};
use itertools::Itertools;
use proptest::prelude::*;

/// Composed channel `V(y|x_0..x_m)` checked against every permutation of its
/// `m + 1` inputs.
fn permutation_residual(avc: &Avc, u: &ConditionalChannel) -> f64 {
    let (nx, ns, ny, m) = (avc.nx(), avc.ns(), avc.ny(), u.arity());
    let v = |xs: &[usize], y: usize| -> f64 {
        let row = u.row(tuple_index(&xs[1..], nx));
        (0..ns).map(|s| avc.w(xs[0], s, y) * row[s]).sum()
    };
    let mut worst: f64 = 0.0;
    for idx in 0..nx.pow(m as u32 + 1) {
        let xs = tuple_digits(idx, nx, m + 1);
        for perm in (0..=m).permutations(m + 1) {
            let ys: Vec<usize> = perm.iter().map(|&k| xs[k]).collect();
            for y in 0..ny {
                worst = worst.max((v(&xs, y) - v(&ys, y)).abs());
            }
        }
    }
    worst
}

fn linear_cost(ns: usize) -> Vec<f64> {
    (0..ns).map(|s| s as f64).collect()
}

#[test]
fn lp_kernels_pass_permutation_oracle() {
    let mut r = rng(11);
    let mut finite = 0;
    for _ in 0..20 {
        let avc = random_avc(&mut r, 2, 3, 2, linear_cost(3));
        let p = random_dist(&mut r, 2);
        for m in 1..=3 {
            for sc in [
                weak_cost(&avc, &p, m).unwrap(),
                strong_cost(&avc, &p, m).unwrap(),
            ] {
                if let Some(u) = sc.kernel().unwrap() {
                    finite += 1;
                    assert!(permutation_residual(&avc, &u) < 1e-7);
                }
            }
        }
    }
    assert!(finite > 20, "only {finite} finite costs");
}

#[test]
fn constraint_system_agrees_with_permutation_oracle() {
    let mut r = rng(12);
    for _ in 0..30 {
        let avc = random_avc(&mut r, 2, 3, 2, linear_cost(3));
        let sys = build_symmetry_constraints(&avc, 1).unwrap();
        let noise = random_kernel(&mut r, 2, 3, 1);
        assert_eq!(
            sys.is_symmetrizing(&noise, 1e-9),
            permutation_residual(&avc, &noise) < 1e-9
        );
        let a = weak_cost(&avc, &Dist::bernoulli(0.2).unwrap(), 1)
            .unwrap()
            .kernel()
            .unwrap();
        let b = weak_cost(&avc, &Dist::bernoulli(0.9).unwrap(), 1)
            .unwrap()
            .kernel()
            .unwrap();
        if let (Some(a), Some(b)) = (a, b) {
            let mixed: Vec<f64> = a
                .as_slice()
                .iter()
                .zip(b.as_slice())
                .map(|(x, y)| 0.3 * x + 0.7 * y)
                .collect();
            let mixed = ConditionalChannel::new(2, 3, 1, mixed).unwrap();
            assert!(permutation_residual(&avc, &mixed) < 1e-8);
            assert!(sys.is_symmetrizing(&mixed, 1e-8));
        }
    }
}

#[test]
fn larger_input_alphabet_kernels() {
    let mut r = rng(13);
    for _ in 0..5 {
        let avc = random_avc(&mut r, 3, 4, 3, linear_cost(4));
        let p = random_dist(&mut r, 3);
        for m in 1..=2 {
            let sc = weak_cost(&avc, &p, m).unwrap();
            if let Some(u) = sc.kernel().unwrap() {
                assert!(permutation_residual(&avc, &u) < 1e-7);
                let full =
                    symmetrizing_cost(&avc, &p, m, CostKind::Weak, Formulation::Full).unwrap();
                assert!((full.value - sc.value).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn full_and_exchangeable_agree_on_example() {
    let ex = build_example(8).unwrap();
    for p1 in [0.0, 0.1, 0.35, 0.5, 0.8, 1.0] {
        let p = Dist::bernoulli(p1).unwrap();
        for m in 1..=4 {
            for kind in [CostKind::Weak, CostKind::Strong] {
                let a =
                    symmetrizing_cost(ex.avc(), &p, m, kind, Formulation::Exchangeable).unwrap();
                let b = symmetrizing_cost(ex.avc(), &p, m, kind, Formulation::Full).unwrap();
                assert!((a.value - b.value).abs() < 1e-7, "p={p1} m={m} {kind:?}");
            }
            let closed = f_weak(8, m, p1).unwrap();
            let lp = weak_cost(ex.avc(), &p, m).unwrap().value;
            assert!((closed - lp).abs() < 1e-7);
        }
    }
}

#[test]
fn example_lp_kernels_are_shift_kernels() {
    // U(s|x^m) = q(s - Σx) for some offset law q
    let ex = build_example(8).unwrap();
    for p1 in [0.2, 0.5, 0.9] {
        let p = Dist::bernoulli(p1).unwrap();
        for m in 1..=3 {
            let u = symmetrizing_cost(ex.avc(), &p, m, CostKind::Strong, Formulation::Full)
                .unwrap()
                .kernel()
                .unwrap()
                .unwrap();
            for idx in 0..1usize << m {
                let t: usize = tuple_digits(idx, 2, m).iter().sum();
                let base = u.row(0);
                let row = u.row(idx);
                for s in 0..9 {
                    let expected = if s >= t { base[s - t] } else { 0.0 };
                    assert!((row[s] - expected).abs() < 1e-7, "p={p1} m={m} idx={idx}");
                }
            }
        }
    }
    let sys = build_symmetry_constraints(ex.avc(), 3).unwrap();
    let mut r = rng(14);
    for _ in 0..10 {
        let k = ShiftKernel::new(8, 3, random_dist(&mut r, 6)).unwrap();
        assert!(sys.is_symmetrizing(&k.to_conditional_channel().unwrap(), 1e-12));
    }
    let bent = ConditionalChannel::from_fn(2, 9, 3, |xs| {
        let t: usize = xs.iter().sum();
        let mut row = vec![0.0; 9];
        row[t + xs[0]] = 1.0;
        row
    })
    .unwrap();
    assert!(!sys.is_symmetrizing(&bent, 1e-6));
}

#[test]
fn strong_matches_shift_family_on_example() {
    let ex = build_example(8).unwrap();
    for p1 in [0.1, 0.25, 0.5, 0.75] {
        let p = Dist::bernoulli(p1).unwrap();
        for m in 1..=3 {
            let lp = strong_cost(ex.avc(), &p, m).unwrap().value;
            assert!((lp - g_strong(8, m, p1).unwrap()).abs() < 1e-7);
        }
    }
}

#[test]
fn high_arity_polytopes_agree() {
    // ill-conditioned symmetry rows at m = 8 once produced a spurious optimum
    let mut r = rng(301);
    for _ in 0..10 {
        let avc = random_avc(&mut r, 2, 3, 3, linear_cost(3));
        let p = random_dist(&mut r, 2);
        for m in 6..=8 {
            let w = weak_cost(&avc, &p, m).unwrap();
            let s = strong_cost(&avc, &p, m).unwrap();
            assert_eq!(w.is_finite(), s.is_finite(), "m={m}");
            assert!(s.value >= w.value - 1e-8);
            let sys = build_symmetry_constraints(&avc, m).unwrap();
            if let Some(u) = s.kernel().unwrap() {
                assert!(sys.residual(&u) < 1e-7);
            }
        }
    }
}

#[test]
fn finite_symmetrizability_bound() {
    // I(P, Λ) > 0 caps the weak threshold at ⌈log2 min(|Y|, |S|) / I(P, Λ)⌉
    let mut r = rng(15);
    let mut checked = 0;
    for _ in 0..20 {
        let avc = random_avc(&mut r, 2, 3, 3, linear_cost(3));
        let p = random_dist(&mut r, 2);
        let lambda = 1.0;
        let info = min_info_over_states(&avc, &p, lambda).unwrap().value;
        if info <= 0.01 {
            continue;
        }
        checked += 1;
        let bound = ((avc.ny().min(avc.ns()) as f64).log2() / info).ceil() as usize;
        let t = weak_symmetrizability(&avc, &p, lambda, 8).unwrap();
        assert!(t.value <= bound, "threshold {} exceeds {bound}", t.value);
    }
    assert!(checked > 0);
}

fn avc_from_seed(seed: u64, nx: usize, ns: usize, ny: usize) -> Avc {
    random_avc(&mut rng(seed), nx, ns, ny, linear_cost(ns))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn strong_dominates_weak(seed in any::<u64>(), p1 in 0.0f64..=1.0, m in 1usize..=8) {
        let avc = avc_from_seed(seed, 2, 3, 2);
        let p = Dist::bernoulli(p1).unwrap();
        let w = weak_cost(&avc, &p, m).unwrap().value;
        let s = strong_cost(&avc, &p, m).unwrap().value;
        prop_assert!(s >= w - 1e-8, "strong {} < weak {}", s, w);
        if w.is_infinite() {
            prop_assert!(s.is_infinite());
        }
        if m == 1 && w.is_finite() {
            prop_assert!((s - w).abs() < 1e-8);
        }
    }

    #[test]
    fn cost_scales_linearly(seed in any::<u64>(), p1 in 0.0f64..=1.0, c in 0.1f64..10.0) {
        let avc = avc_from_seed(seed, 2, 3, 2);
        let scaled = avc.with_cost(avc.cost().iter().map(|l| l * c).collect()).unwrap();
        let p = Dist::bernoulli(p1).unwrap();
        for m in 1..=2 {
            let a = weak_cost(&avc, &p, m).unwrap().value;
            let b = weak_cost(&scaled, &p, m).unwrap().value;
            if a.is_finite() {
                prop_assert!((b - c * a).abs() <= 1e-7 * (1.0 + c * a));
            } else {
                prop_assert!(b.is_infinite());
            }
            let a = strong_cost(&avc, &p, m).unwrap().value;
            let b = strong_cost(&scaled, &p, m).unwrap().value;
            if a.is_finite() {
                prop_assert!((b - c * a).abs() <= 1e-7 * (1.0 + c * a));
            }
        }
    }

    #[test]
    fn thresholds_ordered_and_monotone(seed in any::<u64>(), p1 in 0.05f64..0.95, l1 in 0.0f64..2.0, dl in 0.0f64..1.0) {
        let avc = avc_from_seed(seed, 2, 3, 2);
        let p = Dist::bernoulli(p1).unwrap();
        let weak = weak_symmetrizability(&avc, &p, l1, 4).unwrap();
        let strong = strong_symmetrizability(&avc, &p, l1, 4).unwrap();
        prop_assert!(strong.value <= weak.value);
        let wider = weak_symmetrizability(&avc, &p, l1 + dl, 4).unwrap();
        prop_assert!(wider.value >= weak.value);
        let wider = strong_symmetrizability(&avc, &p, l1 + dl, 4).unwrap();
        prop_assert!(wider.value >= strong.value);
    }
}

mod common;

use avc_list::info::{
    compose_state, conditional_mutual_information, entropy, kl_divergence, mutual_information,
};
use avc_list::types::empirical_joint_type;
use avc_list::{Channel, Dist};
use common::normalize;
use proptest::prelude::*;

fn weights(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, k)
}

fn channel(nx: usize, ny: usize) -> impl Strategy<Value = Channel> {
    prop::collection::vec(weights(ny), nx).prop_map(|rows| {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| normalize(r).into_vec()).collect();
        Channel::from_rows(&rows).unwrap()
    })
}

fn mix(a: &Channel, b: &Channel, t: f64) -> Channel {
    let v: Vec<f64> = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| t * x + (1.0 - t) * y)
        .collect();
    Channel::new(a.nx(), a.ny(), v).unwrap()
}

proptest! {
    #[test]
    fn convex_in_channel(p in weights(3), v1 in channel(3, 4), v2 in channel(3, 4), t in 0.0f64..1.0) {
        let p = normalize(&p);
        let lhs = mutual_information(&p, &mix(&v1, &v2, t)).unwrap();
        let rhs = t * mutual_information(&p, &v1).unwrap() + (1.0 - t) * mutual_information(&p, &v2).unwrap();
        prop_assert!(lhs <= rhs + 1e-10);
    }

    #[test]
    fn output_relabeling(p in weights(2), v in channel(2, 4), perm in Just(vec![2usize, 0, 3, 1])) {
        let p = normalize(&p);
        let rows: Vec<Vec<f64>> = (0..2)
            .map(|x| perm.iter().map(|&y| v.get(x, y)).collect())
            .collect();
        let w = Channel::from_rows(&rows).unwrap();
        let a = mutual_information(&p, &v).unwrap();
        let b = mutual_information(&p, &w).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn information_is_output_minus_noise_entropy(p in weights(3), v in channel(3, 3)) {
        let p = normalize(&p);
        let py: Vec<f64> = (0..3).map(|y| (0..3).map(|x| p[x] * v.get(x, y)).sum()).collect();
        let noise: f64 = (0..3).map(|x| p[x] * entropy(v.row(x))).sum();
        let mi = mutual_information(&p, &v).unwrap();
        prop_assert!((mi - (entropy(&py) - noise)).abs() < 1e-12);
        prop_assert!(mi >= 0.0);
    }

    #[test]
    fn composition_is_linear(seed in any::<u64>(), t in 0.0f64..1.0) {
        let mut rng = common::rng(seed);
        let avc = common::random_avc(&mut rng, 2, 3, 3, vec![0.0, 1.0, 2.0]);
        let q1 = common::random_dist(&mut rng, 3);
        let q2 = common::random_dist(&mut rng, 3);
        let mixed = q2.mix(&q1, t).unwrap();
        let lhs = compose_state(&avc, &mixed).unwrap();
        let a = compose_state(&avc, &q1).unwrap();
        let b = compose_state(&avc, &q2).unwrap();
        for (i, v) in lhs.as_slice().iter().enumerate() {
            let expected = t * a.as_slice()[i] + (1.0 - t) * b.as_slice()[i];
            prop_assert!((v - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn divergence_nonnegative(p in weights(4), q in weights(4)) {
        let (p, q) = (normalize(&p), normalize(&q));
        let d = kl_divergence(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        let close = p.as_slice().iter().zip(q.as_slice()).all(|(a, b)| (a - b).abs() <= 1e-12);
        prop_assert_eq!(d == 0.0 || d < 1e-20, close || d < 1e-20);
        prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn cmi_bounds(seq in prop::collection::vec((0usize..2, 0usize..3, 0usize..2), 1..30)) {
        let a: Vec<usize> = seq.iter().map(|t| t.0).collect();
        let b: Vec<usize> = seq.iter().map(|t| t.1).collect();
        let c: Vec<usize> = seq.iter().map(|t| t.2).collect();
        let jt = empirical_joint_type(&[2, 3, 2], &[&a, &b, &c]).unwrap();
        let cmi = conditional_mutual_information(&jt).unwrap();
        prop_assert!(cmi >= 0.0);
        prop_assert!(cmi <= 1.0 + 1e-12);
    }
}

#[test]
fn divergence_is_mutual_information_of_product() {
    // I(X;Y) = D(P_XY ‖ P_X × P_Y)
    let p = Dist::new(vec![0.3, 0.7]).unwrap();
    let v = Channel::from_rows(&[vec![0.8, 0.2], vec![0.25, 0.75]]).unwrap();
    let py = [0.3 * 0.8 + 0.7 * 0.25, 0.3 * 0.2 + 0.7 * 0.75];
    let joint: Vec<f64> = (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .map(|(x, y)| p[x] * v.get(x, y))
        .collect();
    let product: Vec<f64> = (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .map(|(x, y)| p[x] * py[y])
        .collect();
    let d = kl_divergence(&Dist::new(joint).unwrap(), &Dist::new(product).unwrap()).unwrap();
    assert!((d - mutual_information(&p, &v).unwrap()).abs() < 1e-12);
}

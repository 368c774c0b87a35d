//! Property-based checks of the network, penalty, optimizer and structure
//! invariants.

use nodeprune::optimizer::{initial_params, prox_gradient_fit};
use nodeprune::penalty::{block_soft_threshold, penalty_value, PenaltySpec};
use nodeprune::structure::distance_to_embedded_reference;
use nodeprune::{empirical_risk, forward, risk_gradient, Dataset, NetworkParams, NodeGroup, TrainConfig};
use proptest::prelude::*;

fn params_strategy(max_d: usize, max_h: usize) -> impl Strategy<Value = NetworkParams> {
    (1..=max_d, 1..=max_h).prop_flat_map(|(d, h)| {
        prop::collection::vec(-2.0f64..2.0, h * (d + 2) + 1)
            .prop_map(move |theta| NetworkParams::from_vec(d, h, theta).unwrap())
    })
}

fn data_for(d: usize, n: usize, seed: u64) -> Dataset {
    let mut g = nodeprune::rng::Gaussian::new(nodeprune::rng::stream(seed, 0));
    let mut x = vec![0.0; n * d];
    g.fill(&mut x, 1.0);
    let y = (0..n).map(|_| g.sample()).collect();
    Dataset::new(d, x, y).unwrap()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest eigenvalue of the risk Hessian estimated by power iteration on
/// finite differences of the gradient, maximized over points sampled near
/// the initialization.
fn lipschitz_estimate(params: &NetworkParams, data: &Dataset) -> f64 {
    let g0 = risk_gradient(params, data).unwrap();
    let mut dir: Vec<f64> = (0..params.len()).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
    let mut lambda = 0.0;
    for _ in 0..30 {
        let n = l2(&dir);
        dir.iter_mut().for_each(|x| *x /= n);
        let eps = 1e-5;
        let shifted = NetworkParams::from_vec(
            params.d(),
            params.h(),
            params.as_slice().iter().zip(&dir).map(|(a, b)| a + eps * b).collect(),
        )
        .unwrap();
        let g1 = risk_gradient(&shifted, data).unwrap();
        dir = g1.as_slice().iter().zip(g0.as_slice()).map(|(a, b)| (a - b) / eps).collect();
        lambda = l2(&dir);
    }
    lambda
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_invariant_under_sign_flip_and_permutation(p in params_strategy(3, 5), flip in 0usize..5, x in prop::collection::vec(-3.0f64..3.0, 3)) {
        let x = &x[..p.d()];
        let base = forward(&p, x).unwrap();
        let mut q = p.clone();
        q.sign_flip(flip % p.h());
        prop_assert!((forward(&q, x).unwrap() - base).abs() <= 1e-12);
        let perm: Vec<usize> = (0..p.h()).rev().collect();
        prop_assert!((forward(&p.permuted(&perm).unwrap(), x).unwrap() - base).abs() <= 1e-12);
    }

    #[test]
    fn risk_is_nonnegative_and_zero_on_exact_fit(p in params_strategy(3, 4), seed in 0u64..1000) {
        let data = data_for(p.d(), 8, seed);
        prop_assert!(empirical_risk(&p, &data).unwrap() >= 0.0);
        let y: Vec<f64> = data.rows().map(|r| forward(&p, r).unwrap()).collect();
        let exact = Dataset::new(p.d(), data.x().to_vec(), y).unwrap();
        prop_assert_eq!(empirical_risk(&p, &exact).unwrap(), 0.0);
        prop_assert!(risk_gradient(&p, &exact).unwrap().as_slice().iter().all(|g| *g == 0.0));
    }

    #[test]
    fn prox_is_non_expansive(a in prop::collection::vec(-5.0f64..5.0, 4), b in prop::collection::vec(-5.0f64..5.0, 4), t in 0.0f64..6.0) {
        let pa = block_soft_threshold(&NodeGroup { node_index: 0, values: a.clone() }, t).unwrap();
        let pb = block_soft_threshold(&NodeGroup { node_index: 0, values: b.clone() }, t).unwrap();
        let diff: Vec<f64> = pa.values.iter().zip(&pb.values).map(|(x, y)| x - y).collect();
        let orig: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        prop_assert!(l2(&diff) <= l2(&orig) + 1e-12);
    }

    #[test]
    fn prox_is_positively_homogeneous(w in prop::collection::vec(-5.0f64..5.0, 3), t in 0.0f64..6.0, c in 0.1f64..10.0) {
        let p = block_soft_threshold(&NodeGroup { node_index: 0, values: w.clone() }, t).unwrap();
        let scaled = NodeGroup { node_index: 0, values: w.iter().map(|x| c * x).collect() };
        let q = block_soft_threshold(&scaled, c * t).unwrap();
        for (x, y) in p.values.iter().zip(&q.values) {
            prop_assert!((c * x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn penalty_is_homogeneous_in_reg(p in params_strategy(3, 5), reg in 0.001f64..10.0) {
        let one = penalty_value(&p, &PenaltySpec::group_lasso(p.h(), reg).unwrap()).unwrap();
        let two = penalty_value(&p, &PenaltySpec::group_lasso(p.h(), 2.0 * reg).unwrap()).unwrap();
        prop_assert!((two - 2.0 * one).abs() <= 1e-12 * two.max(1.0));
    }

    #[test]
    fn distance_vanishes_on_the_symmetry_orbit(p in params_strategy(3, 3), extra in 0usize..3, flips in 0u32..8) {
        let h = p.h() + extra;
        let mut q = p.padded(h).unwrap().permuted(&(0..h).rev().collect::<Vec<_>>()).unwrap();
        for i in 0..h {
            if flips >> (i % 3) & 1 == 1 {
                q.sign_flip(i);
            }
        }
        prop_assume!(nodeprune::check_minimal(&p, Default::default()).minimal);
        prop_assert!(distance_to_embedded_reference(&q, &p).unwrap() <= 1e-12);
    }

    #[test]
    fn distance_is_at_most_any_explicit_embedding(p in params_strategy(2, 2), c in params_strategy(2, 4)) {
        prop_assume!(p.d() == c.d() && p.h() <= c.h());
        prop_assume!(nodeprune::check_minimal(&p, Default::default()).minimal);
        let e = p.padded(c.h()).unwrap();
        prop_assert!(distance_to_embedded_reference(&c, &p).unwrap() <= c.distance(&e).unwrap() + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn objective_is_monotone_below_inverse_lipschitz_step(seed in 0u64..10_000, reg in 0.0f64..0.2) {
        let data = data_for(2, 30, seed);
        let init = initial_params(2, 3, seed);
        let l_hat = lipschitz_estimate(&init, &data);
        // The bound is local, so leave a safety factor for the path.
        let cfg = TrainConfig { epochs: 200, learning_rate: 0.5 / l_hat.max(1.0), seed, ..TrainConfig::default() };
        let fit = prox_gradient_fit(&data, &init, &PenaltySpec::group_lasso(3, reg).unwrap(), &cfg).unwrap();
        for w in fit.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10, "objective rose from {} to {}", w[0], w[1]);
        }
    }

    #[test]
    fn zeroed_and_frozen_groups_are_exactly_zero(seed in 0u64..10_000, frozen_node in 0usize..4) {
        let data = data_for(3, 40, seed);
        let mut init = initial_params(3, 4, seed);
        init.set_node_group(&NodeGroup { node_index: frozen_node, values: vec![0.0; 5] }).unwrap();
        let mut frozen = vec![false; 4];
        frozen[frozen_node] = true;
        let spec = PenaltySpec::adaptive(0.3, vec![1.0; 4], frozen, 2.0).unwrap();
        let cfg = TrainConfig { epochs: 300, learning_rate: 0.05, seed, ..TrainConfig::default() };
        let fit = prox_gradient_fit(&data, &init, &spec, &cfg).unwrap();
        prop_assert!(fit.params.group(frozen_node).iter().all(|x| x.to_bits() == 0));
        for i in 0..4 {
            let g = fit.params.group(i);
            // a group is either exactly zero or clearly alive: no float dust
            prop_assert!(g.iter().all(|x| x.to_bits() == 0) || l2(g) > 1e-8);
        }
    }
}

use hpsplinet::net::{self, complexity, MlpNetwork, MlpSpec, TrainConfig, Validation};
use hpsplinet::seeds;
use proptest::prelude::*;
use rand::Rng;

fn random_data(d: usize, n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = seeds::rng(seed);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y = x.iter().map(|s| s.iter().map(|v| v * v).sum::<f64>().sin()).collect();
    (x, y)
}

/// Norm-wise relative error between backprop and central differences.
fn gradient_check(spec: &MlpSpec, seed: u64) -> f64 {
    // jitter every parameter so biases are nonzero and no unit sits on a kink
    let mut net = MlpNetwork::init(spec, seed);
    let mut rng = seeds::rng(seed ^ 0x5eed);
    let jittered: Vec<f64> = net.params().iter().map(|p| p + rng.random_range(-0.3..0.3)).collect();
    net.set_params(&jittered).unwrap();
    let (x, y) = random_data(spec.input_dim, 6, seed ^ 0xabc);
    let (_, g) = net.loss_and_gradient(&x, &y).unwrap();
    let theta = net.params();
    let h = 1e-6;
    let mut probe = net.clone();
    let mut fd = vec![0.0; theta.len()];
    for k in 0..theta.len() {
        let mut p = theta.clone();
        p[k] = theta[k] + h;
        probe.set_params(&p).unwrap();
        let up = probe.loss_and_gradient(&x, &y).unwrap().0;
        p[k] = theta[k] - h;
        probe.set_params(&p).unwrap();
        let down = probe.loss_and_gradient(&x, &y).unwrap().0;
        fd[k] = (up - down) / (2.0 * h);
    }
    let diff: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let l2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let norm = l2(&g).max(l2(&fd)).max(1e-12);
    diff / norm
}

#[test]
fn backprop_matches_central_differences() {
    let mut rng = seeds::rng(2024);
    for cfg in 0..20 {
        let d = rng.random_range(1..6);
        let depth = rng.random_range(3..6);
        let width = rng.random_range(1..6);
        let spec = MlpSpec::new(d, depth, width).unwrap();
        let err = gradient_check(&spec, cfg);
        assert!(err < 1e-5, "config {cfg} ({d}, {depth}, {width}): relative error {err}");
    }
}

#[test]
fn parameter_count_is_the_complexity() {
    for depth in 3..=5 {
        for width in 1..=5 {
            let spec = MlpSpec::new(32, depth, width).unwrap();
            assert_eq!(MlpNetwork::init(&spec, 0).num_params(), complexity(&spec));
        }
    }
}

fn small_run(seed: u64) -> net::TrainOutcome {
    let spec = MlpSpec::new(4, 3, 5).unwrap();
    let (x, y) = random_data(4, 40, 7);
    let (vx, vy) = random_data(4, 10, 8);
    let cfg = TrainConfig {
        max_epochs: 30,
        batch_size: 8,
        seed,
        ..TrainConfig::default()
    };
    let val = Validation {
        inputs: &vx,
        targets: &vy,
    };
    net::train(&MlpNetwork::init(&spec, seed), &x, &y, Some(val), &cfg).unwrap()
}

#[test]
fn identical_inputs_give_identical_histories() {
    let a = small_run(5);
    let b = small_run(5);
    let bits = |o: &net::TrainOutcome| -> Vec<u64> {
        o.history
            .iter()
            .flat_map(|r| [r.train_mse.to_bits(), r.val_max.unwrap().to_bits(), r.best.to_bits()])
            .collect()
    };
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.net.params(), b.net.params());
    assert_ne!(bits(&a), bits(&small_run(6)));
}

#[test]
fn best_score_never_increases() {
    let out = small_run(1);
    for w in out.history.windows(2) {
        assert!(w[1].best <= w[0].best);
    }
    let last = out.history.last().unwrap();
    assert_eq!(out.best_score(), last.best);
}

#[test]
fn duplicated_samples_with_doubled_batches_match() {
    let spec = MlpSpec::new(3, 4, 4).unwrap();
    let (x, y) = random_data(3, 16, 11);
    let mut x2 = Vec::new();
    let mut y2 = Vec::new();
    for (s, t) in x.iter().zip(&y) {
        x2.extend([s.clone(), s.clone()]);
        y2.extend([*t, *t]);
    }
    let cfg = TrainConfig {
        max_epochs: 3,
        batch_size: 4,
        shuffle: false,
        seed: 3,
        ..TrainConfig::default()
    };
    let init = MlpNetwork::init(&spec, 3);
    let a = net::train(&init, &x, &y, None, &cfg).unwrap();
    let doubled = TrainConfig {
        batch_size: 8,
        ..cfg.clone()
    };
    let b = net::train(&init, &x2, &y2, None, &doubled).unwrap();
    for (p, q) in a.net.params().iter().zip(b.net.params()) {
        assert!((p - q).abs() <= 1e-10 * p.abs().max(1.0), "{p} vs {q}");
    }
}

#[test]
fn json_round_trip_is_exact() {
    let out = small_run(2);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    out.net.save_json(&p).unwrap();
    let back = MlpNetwork::load_json(&p).unwrap();
    assert_eq!(back, out.net);
    let (x, _) = random_data(4, 5, 99);
    assert_eq!(back.predict(&x).unwrap(), out.net.predict(&x).unwrap());
}

#[test]
fn malformed_inputs_are_rejected() {
    let spec = MlpSpec::new(2, 3, 2).unwrap();
    let n = MlpNetwork::init(&spec, 0);
    assert!(n.forward(&[1.0]).is_err());
    assert!(MlpSpec::new(2, 2, 2).is_err());
    let cfg = TrainConfig {
        learning_rate: -1.0,
        ..TrainConfig::default()
    };
    assert!(net::train(&n, &[vec![0.0, 0.0]], &[1.0], None, &cfg).is_err());
    assert!(net::train(&n, &[vec![f64::NAN, 0.0]], &[1.0], None, &TrainConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn empirical_lipschitz_is_dominated(seed in 0u64..10_000, depth in 3usize..6, width in 1usize..8) {
        let spec = MlpSpec::new(6, depth, width).unwrap();
        let n = MlpNetwork::init(&spec, seed);
        let (x, _) = random_data(6, 25, seed + 1);
        let emp = n.lipschitz_empirical(&x).unwrap();
        prop_assert!(emp <= n.lipschitz_upper() + 1e-9);
    }

    #[test]
    fn scaling_a_layer_scales_the_upper_bound(seed in 0u64..10_000, layer in 0usize..3, c in 0.1f64..10.0) {
        let spec = MlpSpec::new(5, 4, 3).unwrap();
        let mut n = MlpNetwork::init(&spec, seed);
        let before = n.lipschitz_upper();
        n.scale_layer(layer, c);
        let after = n.lipschitz_upper();
        prop_assert!((after - c * before).abs() <= 1e-10 * (c * before).max(1e-300));
    }

    #[test]
    fn relu_network_is_positively_homogeneous_without_biases(seed in 0u64..1000, k in 0.1f64..5.0) {
        let spec = MlpSpec::new(3, 3, 4).unwrap();
        let n = MlpNetwork::init(&spec, seed);
        let (x, _) = random_data(3, 1, seed);
        let a = n.forward(&x[0]).unwrap();
        let scaled: Vec<f64> = x[0].iter().map(|v| v * k).collect();
        let b = n.forward(&scaled).unwrap();
        prop_assert!((b - k * a).abs() <= 1e-12 * (1.0 + (k * a).abs()));
    }
}

use hpsplinet::datasets::{self, AlphaFunction, XSampling};
use hpsplinet::harness::{self, io, table1};
use hpsplinet::hpfit::BasisCache;
use hpsplinet::net::{MlpNetwork, MlpSpec, TrainConfig};
use hpsplinet::stability::{self, GenGapConfig, GenGapRecord, SplineConfig};
use hpsplinet::wavelets::WaveletFamily;

fn tiny_gengap() -> GenGapConfig {
    GenGapConfig {
        pool_size: 32,
        signal_len: 64,
        width: 4,
        train: TrainConfig {
            max_epochs: 5,
            ..GenGapConfig::default().train
        },
        ..GenGapConfig::default()
    }
}

#[test]
fn noiseless_test_set_has_zero_gap() {
    let cfg = GenGapConfig {
        noise_fraction: 0.0,
        ..tiny_gengap()
    };
    let r = stability::gengap_experiment(16, 1.0, 0, 3, &cfg).unwrap();
    assert_eq!(r.gengap, 0.0);
    assert_eq!(r.loss_train, r.loss_test);
}

#[test]
fn recorded_bound_is_diameter_over_root_n() {
    let cfg = tiny_gengap();
    for (n, level) in [(8, 0), (16, 1), (32, 3)] {
        let r = stability::gengap_experiment(n, 2.0, level, 1, &cfg).unwrap();
        assert_eq!(r.bound, r.diameter / (n as f64).sqrt());
        assert_eq!(r.gengap, (r.loss_train - r.loss_test).abs());
    }
}

#[test]
fn projection_shrinks_the_recorded_diameter() {
    let cfg = tiny_gengap();
    for family in [WaveletFamily::Haar, WaveletFamily::D4] {
        let cfg = GenGapConfig { family, ..cfg.clone() };
        let full = stability::gengap_experiment(16, 1.0, 0, 7, &cfg).unwrap();
        let mut prev = full.diameter;
        for level in 1..=4 {
            let r = stability::gengap_experiment(16, 1.0, level, 7, &cfg).unwrap();
            assert!(r.diameter <= prev + 1e-12);
            assert!(r.bound <= full.bound + 1e-12);
            prev = r.diameter;
        }
    }
}

#[test]
fn gengap_rejects_bad_parameters() {
    let cfg = tiny_gengap();
    assert!(stability::gengap_experiment(64, 1.0, 0, 0, &cfg).is_err());
    assert!(stability::gengap_experiment(8, 1.0, 9, 0, &cfg).is_err());
    let bad = GenGapConfig {
        noise_fraction: 1.2,
        ..cfg
    };
    assert!(stability::gengap_experiment(8, 1.0, 0, 0, &bad).is_err());
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let cfg = tiny_gengap();
    let a = harness::gengap_sweep(&[8, 16], &[1.0], &[0, 1], 2, 9, &cfg).unwrap();
    let b = harness::gengap_sweep(&[8, 16], &[1.0], &[0, 1], 2, 9, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 8);
    assert_eq!((a[0].n, a[0].level), (8, 0));
    assert_eq!((a[1].n, a[1].level), (16, 0));
    // per seed and level, D is fixed so the bound falls with n
    for pair in a.chunks(2) {
        assert_eq!(pair[0].diameter, pair[1].diameter);
        assert!(pair[1].bound < pair[0].bound);
    }
    let trends = harness::gap_trends(&a);
    assert_eq!(trends.len(), 2);
    assert_eq!(trends[0].sizes, vec![8, 16]);
}

#[test]
fn self_replacement_has_zero_stability() {
    let t = datasets::time_grid(32, true);
    let data = datasets::multiscale_dataset(12, 1.0, &t, 4).unwrap();
    let (x, y): (Vec<_>, Vec<_>) = data.into_iter().map(|s| (s.samples, s.alpha_target)).unzip();
    let init = MlpNetwork::init(&MlpSpec::new(32, 3, 6).unwrap(), 1);
    let cfg = TrainConfig {
        max_epochs: 20,
        batch_size: 4,
        seed: 2,
        ..TrainConfig::default()
    };
    let r = stability::stability_probe(&x, &y, 3, (&x[3], y[3]), (&x, &y), &init, &cfg).unwrap();
    assert_eq!(r.beta_hat, 0.0);
    assert_eq!(r.bound, r.l_loss * r.l_f * r.diameter);
    assert!(stability::stability_probe(&x, &y, 99, (&x[3], y[3]), (&x, &y), &init, &cfg).is_err());
}

#[test]
fn injected_true_alpha_has_no_propagation() {
    let t = datasets::time_grid(32, true);
    let grid: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    for f in [AlphaFunction::A1, AlphaFunction::A3] {
        // recover α from e^{-α t} at the second sample
        let oracle = |s: &[f64]| -(s[1].ln()) * 31.0;
        let r = stability::audit_prop1(f, &oracle, &SplineConfig::default(), &t, &grid).unwrap();
        assert!(r.eps_hat < 1e-12);
        assert!(r.propagation < 1e-10);
        assert!(r.holds);
    }
}

#[test]
fn a3_singular_point_enters_the_report() {
    let t = datasets::time_grid(32, true);
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    // a predictor that is off by 0.2 only next to the cusp
    let predict = |s: &[f64]| {
        let a = -(s[1].ln()) * 31.0;
        let x0 = AlphaFunction::A3.eval(0.37).unwrap();
        if (a - x0).abs() < 1e-3 {
            a + 0.2
        } else {
            a
        }
    };
    let r = stability::audit_prop1(AlphaFunction::A3, &predict, &SplineConfig::default(), &t, &grid).unwrap();
    assert_eq!(r.deltas.len(), 1);
    assert_eq!(r.deltas[0].0, 0.37);
    assert!(r.eps_hat < 1e-12);
    assert!(r.deltas[0].1 > 0.0);
    assert!(r.holds);
}

#[test]
fn composite_bound_holds_for_a_small_network() {
    let t = datasets::time_grid(32, true);
    let xs = table1::test_abscissae(12);
    let signals: Vec<Vec<f64>> = datasets::make_sweep_dataset(AlphaFunction::A1, &xs, &t, 0)
        .unwrap()
        .into_iter()
        .map(|s| s.samples)
        .collect();
    let net = MlpNetwork::init(&MlpSpec::new(32, 3, 3).unwrap(), 5);
    let mut shifted = net.clone();
    let mut p = shifted.params();
    let last = p.len() - 1;
    p[last] = 1.0; // keep predictions positive
    shifted.set_params(&p).unwrap();
    let a = stability::bound_audit(&shifted, &signals, &t, &SplineConfig::default()).unwrap();
    assert!(a.l_f_emp <= a.l_f_upper + 1e-9);
    assert!(a.observed_composite <= a.composite_bound * 1.05);
    assert!(a.holds);
}

#[test]
fn spearman_of_monotone_sequences() {
    let x = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(stability::spearman(&x, &[9.0, 5.0, 2.0, 1.0]), -1.0);
    assert_eq!(stability::spearman(&x, &[1.0, 5.0, 7.0, 10.0]), 1.0);
}

#[test]
fn oracle_rows_report_zero_propagation() {
    let predict = |s: &[f64]| -(s[1].ln()) * 31.0;
    let m = table1::row_metrics(
        AlphaFunction::A4,
        &predict,
        &table1::test_abscissae(20),
        &SplineConfig::default(),
        &BasisCache::new(),
    )
    .unwrap();
    assert!(m.mse_propagation < 1e-20);
    assert!(m.max_rec_nom < 1e-6);
}

#[test]
fn records_and_signals_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let recs = vec![GenGapRecord {
        n: 32,
        amplitude: 5.5,
        level: 2,
        seed: u64::MAX,
        loss_train: 0.1 + 0.2,
        loss_test: 1e-300,
        gengap: 0.3,
        diameter: 1.0 / 3.0,
        bound: 0.1,
    }];
    let p = dir.path().join("sub/g.csv");
    io::write_records(&p, &recs).unwrap();
    let back: Vec<GenGapRecord> = io::read_records(&p).unwrap();
    assert_eq!(back, recs);
    let header = std::fs::read_to_string(&p).unwrap();
    assert!(header.starts_with("n,A,J,seed,"));

    let t = datasets::time_grid(8, true);
    let xs = datasets::sweep_abscissae(3, XSampling::Grid, 0);
    let sigs = datasets::make_sweep_dataset(AlphaFunction::A2, &xs, &t, 0).unwrap();
    let sp = dir.path().join("s.csv");
    io::write_signals(&sp, &sigs).unwrap();
    let back = io::read_signals(&sp).unwrap();
    assert_eq!(back.len(), 3);
    for (a, b) in back.iter().zip(&sigs) {
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.alpha_target, b.alpha_target);
    }
}

#[test]
fn plots_are_written_per_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_gengap();
    let recs = harness::gengap_sweep(&[8, 16], &[1.0, 5.5], &[0], 1, 0, &cfg).unwrap();
    harness::plot_gengap(&recs, dir.path()).unwrap();
    assert!(dir.path().join("gengap_A1.svg").exists());
    assert!(dir.path().join("gengap_A5p5.svg").exists());
}

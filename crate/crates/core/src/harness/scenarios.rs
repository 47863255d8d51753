//! Predicted versus grid-search frequencies on exponential test signals.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::datasets::{self, ScenarioKind, SWEEP_DIM};
use crate::error::{Error, Result};
use crate::hpfit::{self, reconstruction_metrics, BasisCache};
use crate::net::{self, MlpNetwork, MlpSpec, TrainConfig};
use crate::oracle::{self, AlphaSearchConfig};
use crate::seeds::{self, derive_seed};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    /// Training signals per family (s1 and s2).
    pub n_train: usize,
    /// Oracle-labelled s3 signals added in scenario 3.
    pub n_enrich: usize,
    pub n_test: usize,
    pub alpha_range: (f64, f64),
    pub amplitude_range: (f64, f64),
    /// Noise on scenario-1 test signals.
    pub noise_sigma: f64,
    pub depth: usize,
    pub width: usize,
    pub seed: u64,
    pub search: AlphaSearchConfig,
    pub train: TrainConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_train: 250,
            n_enrich: 250,
            n_test: 50,
            alpha_range: (0.5, 5.0),
            amplitude_range: (0.5, 2.0),
            noise_sigma: 1e-2,
            depth: 4,
            width: 16,
            seed: 0,
            search: AlphaSearchConfig::default(),
            train: TrainConfig {
                max_epochs: 2000,
                ..TrainConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInstance {
    pub scenario: u8,
    pub seed: u64,
    pub index: usize,
    pub family: ScenarioKind,
    pub alpha_true: f64,
    pub alpha_pred: f64,
    pub alpha_oracle: f64,
    pub mse_pred: f64,
    pub re_pred: f64,
    pub mse_oracle: f64,
    pub re_oracle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: u8,
    pub seed: u64,
    pub instances: Vec<ScenarioInstance>,
    pub mean_mse_pred: f64,
    pub mean_re_pred: f64,
    pub mean_mse_oracle: f64,
    pub mean_re_oracle: f64,
    /// Enrichment signals dropped because the search failed.
    pub skipped: usize,
}

/// Divides by the largest absolute sample, so the input no longer carries
/// the amplitude.
pub fn normalize_input(s: &[f64]) -> Vec<f64> {
    let m = s.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return s.to_vec();
    }
    s.iter().map(|v| v / m).collect()
}

/// HP-spline frequency for a family: growing exponentials use `-α`.
pub fn fit_frequency(family: ScenarioKind, alpha: f64) -> f64 {
    match family {
        ScenarioKind::S1 => -alpha,
        _ => alpha,
    }
}

fn draw(kind: ScenarioKind, cfg: &ScenarioConfig, rng: &mut impl Rng, t: &[f64]) -> datasets::LabeledSignal {
    let alpha = rng.random_range(cfg.alpha_range.0..=cfg.alpha_range.1);
    let amp = rng.random_range(cfg.amplitude_range.0..=cfg.amplitude_range.1);
    datasets::make_scenario_signal(kind, amp, alpha, t)
}

struct TestSignal {
    family: ScenarioKind,
    alpha_true: f64,
    samples: Vec<f64>,
}

fn search_for(family: ScenarioKind, cfg: &ScenarioConfig) -> AlphaSearchConfig {
    AlphaSearchConfig {
        negate: family == ScenarioKind::S1,
        ..cfg.search.clone()
    }
}

pub fn run_scenario(scenario: u8, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    if !(1..=3).contains(&scenario) {
        return Err(Error::invalid(format!("scenario must be 1, 2 or 3, got {scenario}")));
    }
    if cfg.n_train == 0 || cfg.n_test == 0 {
        return Err(Error::invalid("scenario needs training and test signals"));
    }
    let t = datasets::time_grid(SWEEP_DIM, true);
    let cache = BasisCache::new();

    let mut rng = seeds::rng(derive_seed(cfg.seed, &[1]));
    let mut train: Vec<datasets::LabeledSignal> = Vec::with_capacity(2 * cfg.n_train);
    for _ in 0..cfg.n_train {
        train.push(draw(ScenarioKind::S1, cfg, &mut rng, &t));
        train.push(draw(ScenarioKind::S2, cfg, &mut rng, &t));
    }

    let mut skipped = 0;
    if scenario == 3 {
        let mut erng = seeds::rng(derive_seed(cfg.seed, &[2]));
        let s3 = search_for(ScenarioKind::S3, cfg);
        for _ in 0..cfg.n_enrich {
            let mut sig = draw(ScenarioKind::S3, cfg, &mut erng, &t);
            match oracle::optimal_alpha_cached(&t, &sig.samples, &s3, &cache) {
                Ok(r) => {
                    sig.alpha_target = r.alpha;
                    train.push(sig);
                }
                Err(e) => {
                    log::warn!("enrichment signal skipped: {e}");
                    skipped += 1;
                }
            }
        }
    }

    // test signals depend on the seed only, so scenarios 2 and 3 share them
    let test: Vec<TestSignal> = if scenario == 1 {
        let mut trng = seeds::rng(derive_seed(cfg.seed, &[3]));
        let noise = Normal::new(0.0, cfg.noise_sigma).map_err(|e| Error::invalid(e.to_string()))?;
        let base = &train[..2 * cfg.n_train];
        (0..cfg.n_test)
            .map(|_| {
                let src = &base[trng.random_range(0..base.len())];
                let family = if src.provenance.generator == "s1" {
                    ScenarioKind::S1
                } else {
                    ScenarioKind::S2
                };
                TestSignal {
                    family,
                    alpha_true: src.alpha_target,
                    samples: src.samples.iter().map(|v| v + noise.sample(&mut trng)).collect(),
                }
            })
            .collect()
    } else {
        let mut trng = seeds::rng(derive_seed(cfg.seed, &[4]));
        (0..cfg.n_test)
            .map(|_| {
                let s = draw(ScenarioKind::S3, cfg, &mut trng, &t);
                TestSignal {
                    family: ScenarioKind::S3,
                    alpha_true: s.alpha_target,
                    samples: s.samples,
                }
            })
            .collect()
    };

    let inputs: Vec<Vec<f64>> = train.iter().map(|s| normalize_input(&s.samples)).collect();
    let targets: Vec<f64> = train.iter().map(|s| s.alpha_target).collect();
    let spec = MlpSpec::new(SWEEP_DIM, cfg.depth, cfg.width)?;
    let init = MlpNetwork::init(&spec, derive_seed(cfg.seed, &[5]));
    let tcfg = TrainConfig {
        seed: derive_seed(cfg.seed, &[6]),
        ..cfg.train.clone()
    };
    let model = net::train(&init, &inputs, &targets, None, &tcfg)?.net;

    let knots = oracle::knots_for(&t, cfg.search.knot_step)?;
    let lambda = cfg.search.lambda;
    let mut instances = Vec::with_capacity(test.len());
    for (index, ts) in test.iter().enumerate() {
        // keep the prediction inside the searched range
        let raw = model.forward(&normalize_input(&ts.samples))?;
        let alpha_pred = raw.clamp(cfg.search.alpha_min, cfg.search.alpha_max);
        let found = oracle::optimal_alpha_cached(&t, &ts.samples, &search_for(ts.family, cfg), &cache)?;
        let fit_p = hpfit::fit(&t, &ts.samples, fit_frequency(ts.family, alpha_pred), lambda, knots)?.evaluate(&t)?;
        let fit_o = hpfit::fit(&t, &ts.samples, fit_frequency(ts.family, found.alpha), lambda, knots)?.evaluate(&t)?;
        let mp = reconstruction_metrics(&ts.samples, &fit_p)?;
        let mo = reconstruction_metrics(&ts.samples, &fit_o)?;
        instances.push(ScenarioInstance {
            scenario,
            seed: cfg.seed,
            index,
            family: ts.family,
            alpha_true: ts.alpha_true,
            alpha_pred,
            alpha_oracle: found.alpha,
            mse_pred: mp.mse,
            re_pred: mp.rel,
            mse_oracle: mo.mse,
            re_oracle: mo.rel,
        });
    }
    let mean = |f: fn(&ScenarioInstance) -> f64| instances.iter().map(f).sum::<f64>() / instances.len() as f64;
    Ok(ScenarioReport {
        scenario,
        seed: cfg.seed,
        mean_mse_pred: mean(|i| i.mse_pred),
        mean_re_pred: mean(|i| i.re_pred),
        mean_mse_oracle: mean(|i| i.mse_oracle),
        mean_re_oracle: mean(|i| i.re_oracle),
        instances,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_removes_amplitude() {
        let a = normalize_input(&[2.0, -4.0, 1.0]);
        assert_eq!(a, vec![0.5, -1.0, 0.25]);
        assert_eq!(normalize_input(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn growing_family_uses_negative_frequency() {
        assert_eq!(fit_frequency(ScenarioKind::S1, 2.0), -2.0);
        assert_eq!(fit_frequency(ScenarioKind::S3, 2.0), 2.0);
    }

    #[test]
    fn bad_scenario_id() {
        assert!(run_scenario(4, &ScenarioConfig::default()).is_err());
    }
}

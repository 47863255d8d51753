//! Architecture sweep: smallest width reaching a sup-norm target per depth.

use serde::{Deserialize, Serialize};

use crate::datasets::{self, AlphaFunction, XSampling, SWEEP_DIM};
use crate::error::Result;
use crate::hbasis::UniformKnots;
use crate::hpfit::{self, BasisCache};
use crate::net::{self, complexity, MlpNetwork, MlpSpec, TrainConfig, Validation};
use crate::seeds::derive_seed;
use crate::stability::SplineConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha_fn: AlphaFunction,
    pub seed: u64,
    pub eps: f64,
    #[serde(rename = "L")]
    pub depth: usize,
    #[serde(rename = "W")]
    pub width: usize,
    #[serde(rename = "C_tot")]
    pub c_tot: usize,
    /// True if no width up to the cap met `eps`; the row then reports the cap.
    pub unmet: bool,
    pub val_max: f64,
    pub epochs: usize,
    pub max_alpha_err: f64,
    pub mse_alpha_err: f64,
    pub max_rec_pred: f64,
    pub mse_rec_pred: f64,
    pub max_rec_nom: f64,
    pub mse_rec_nom: f64,
    pub mse_propagation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Table1Config {
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub sampling: XSampling,
    pub width_cap: usize,
    pub seed: u64,
    pub spline: SplineConfig,
    pub train: TrainConfig,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            n_train: 1000,
            n_val: 200,
            n_test: 100,
            sampling: XSampling::Grid,
            width_cap: 8,
            seed: 0,
            spline: SplineConfig::default(),
            train: TrainConfig {
                eval_every: 10,
                ..TrainConfig::default()
            },
        }
    }
}

pub const DEFAULT_EPS: [f64; 3] = [0.10, 0.07, 0.008];
pub const DEFAULT_DEPTHS: [usize; 3] = [3, 4, 5];

/// Held-out test abscissae `(k + 0.3) / n`, disjoint from the training and
/// validation grids.
pub fn test_abscissae(n: usize) -> Vec<f64> {
    (0..n).map(|k| (k as f64 + 0.3) / n as f64).collect()
}

/// Alpha and reconstruction errors of a predictor on `e^{-α(x) t}` test signals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RowMetrics {
    pub max_alpha_err: f64,
    pub mse_alpha_err: f64,
    pub max_rec_pred: f64,
    pub mse_rec_pred: f64,
    pub max_rec_nom: f64,
    pub mse_rec_nom: f64,
    pub mse_propagation: f64,
}

pub fn row_metrics(
    alpha_fn: AlphaFunction,
    predict: &dyn Fn(&[f64]) -> f64,
    xs: &[f64],
    spline: &SplineConfig,
    cache: &BasisCache,
) -> Result<RowMetrics> {
    let t = datasets::time_grid(SWEEP_DIM, true);
    let knots = UniformKnots::spanning(0.0, 1.0, spline.knot_step)?;
    let mut m = RowMetrics::default();
    let n = xs.len() as f64;
    for &x in xs {
        let sig = datasets::exponential_signal(alpha_fn, x, &t, 0)?;
        let alpha = sig.alpha_target;
        let pred = predict(&sig.samples);
        let err = (pred - alpha).abs();
        m.max_alpha_err = m.max_alpha_err.max(err);
        m.mse_alpha_err += err * err / n;
        let nom = hpfit::fit_with_basis(cache.get(alpha, knots)?, &t, &sig.samples, spline.lambda)?.evaluate(&t)?;
        let prd = if pred == alpha {
            nom.clone()
        } else {
            hpfit::fit(&t, &sig.samples, pred, spline.lambda, knots)?.evaluate(&t)?
        };
        let mut sq_p = 0.0;
        let mut sq_n = 0.0;
        let mut sq_prop = 0.0;
        for ((s, p), q) in sig.samples.iter().zip(&prd).zip(&nom) {
            m.max_rec_pred = m.max_rec_pred.max((s - p).abs());
            m.max_rec_nom = m.max_rec_nom.max((s - q).abs());
            sq_p += (s - p).powi(2);
            sq_n += (s - q).powi(2);
            sq_prop += (p - q).powi(2);
        }
        let d = t.len() as f64;
        m.mse_rec_pred += sq_p / d / n;
        m.mse_rec_nom += sq_n / d / n;
        m.mse_propagation += sq_prop / d / n;
    }
    Ok(m)
}

type Split = (Vec<Vec<f64>>, Vec<f64>);

fn sweep_data(alpha_fn: AlphaFunction, cfg: &Table1Config) -> Result<(Split, Split)> {
    let t = datasets::time_grid(SWEEP_DIM, true);
    let xs = datasets::sweep_abscissae(cfg.n_train, cfg.sampling, derive_seed(cfg.seed, &[10]));
    let train = datasets::make_sweep_dataset(alpha_fn, &xs, &t, cfg.seed)?;
    let val = datasets::make_sweep_dataset(alpha_fn, &datasets::validation_abscissae(cfg.n_val), &t, cfg.seed)?;
    let split = |v: Vec<datasets::LabeledSignal>| v.into_iter().map(|s| (s.samples, s.alpha_target)).unzip();
    Ok((split(train), split(val)))
}

/// For every `(ε, L)` cell, trains widths `1..=width_cap` in order and
/// keeps the first that meets `ε` on the validation grid.
pub fn run_table1(alpha_fn: AlphaFunction, eps_list: &[f64], depths: &[usize], cfg: &Table1Config) -> Result<Vec<SweepRow>> {
    let ((tx, ty), (vx, vy)) = sweep_data(alpha_fn, cfg)?;
    let cache = BasisCache::new();
    let test_x = test_abscissae(cfg.n_test);
    let mut rows = Vec::new();
    for &eps in eps_list {
        for &depth in depths {
            let mut last = None;
            for width in 1..=cfg.width_cap {
                let spec = MlpSpec::new(SWEEP_DIM, depth, width)?;
                let cell = [depth as u64, width as u64];
                let init = MlpNetwork::init(&spec, derive_seed(cfg.seed, &[1, cell[0], cell[1]]));
                let tcfg = TrainConfig {
                    seed: derive_seed(cfg.seed, &[2, cell[0], cell[1]]),
                    target_eps: Some(eps),
                    ..cfg.train.clone()
                };
                let val = Validation {
                    inputs: &vx,
                    targets: &vy,
                };
                let out = match net::train(&init, &tx, &ty, Some(val), &tcfg) {
                    Ok(o) => o,
                    Err(e) if e.is_numerical() => {
                        log::warn!("{alpha_fn} eps={eps} L={depth} W={width}: {e}");
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let met = out.converged;
                last = Some((width, out));
                if met {
                    break;
                }
            }
            let Some((width, out)) = last else { continue };
            let trained = out.net;
            let predict = |s: &[f64]| trained.forward(s).unwrap_or(f64::NAN);
            let m = row_metrics(alpha_fn, &predict, &test_x, &cfg.spline, &cache)?;
            rows.push(SweepRow {
                alpha_fn,
                seed: cfg.seed,
                eps,
                depth,
                width,
                c_tot: complexity(&MlpSpec::new(SWEEP_DIM, depth, width)?),
                unmet: !out.converged,
                val_max: out.history.iter().filter_map(|r| r.val_max).fold(f64::INFINITY, f64::min),
                epochs: out.history.last().map_or(0, |r| r.epoch),
                max_alpha_err: m.max_alpha_err,
                mse_alpha_err: m.mse_alpha_err,
                max_rec_pred: m.max_rec_pred,
                mse_rec_pred: m.mse_rec_pred,
                max_rec_nom: m.max_rec_nom,
                mse_rec_nom: m.mse_rec_nom,
                mse_propagation: m.mse_propagation,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_predictor_has_no_propagation() {
        let f = AlphaFunction::A2;
        let predict = |s: &[f64]| {
            // recover α from the second sample of e^{-α t}
            -(s[1].ln()) * (SWEEP_DIM - 1) as f64
        };
        let m = row_metrics(f, &predict, &test_abscissae(10), &SplineConfig::default(), &BasisCache::new()).unwrap();
        assert!(m.max_alpha_err < 1e-12);
        assert!(m.mse_propagation < 1e-24);
        assert!(m.mse_rec_pred <= m.max_rec_pred.powi(2));
    }

    #[test]
    fn test_points_are_held_out() {
        let train = datasets::sweep_abscissae(1000, XSampling::Grid, 0);
        let val = datasets::validation_abscissae(200);
        for x in test_abscissae(100) {
            assert!(train.iter().chain(&val).all(|y| (x - y).abs() > 1e-6));
        }
    }
}

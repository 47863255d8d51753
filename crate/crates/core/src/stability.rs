//! Empirical stability and generalization-gap measurements.

use serde::{Deserialize, Serialize};

use crate::datasets::{self, AlphaFunction, LabeledSignal, MULTISCALE_LEN};
use crate::error::{Error, Result};
use crate::hbasis::UniformKnots;
use crate::hpfit::{self, BasisCache};
use crate::net::{self, euclidean, MlpNetwork, MlpSpec, TrainConfig};
use crate::seeds::derive_seed;
use crate::wavelets::{self, WaveletFamily, WaveletProjector};

/// One cell of the generalization-gap sweep. `level = 0` means no projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenGapRecord {
    pub n: usize,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "J")]
    pub level: usize,
    pub seed: u64,
    pub loss_train: f64,
    pub loss_test: f64,
    pub gengap: f64,
    pub diameter: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenGapConfig {
    pub noise_sigma: f64,
    pub noise_fraction: f64,
    pub family: WaveletFamily,
    /// Signals drawn per seed; every training set is a prefix of this pool.
    pub pool_size: usize,
    pub signal_len: usize,
    pub depth: usize,
    pub width: usize,
    pub train: TrainConfig,
}

impl Default for GenGapConfig {
    fn default() -> Self {
        Self {
            noise_sigma: 1e-2,
            noise_fraction: 0.3,
            family: WaveletFamily::Haar,
            pool_size: 512,
            signal_len: MULTISCALE_LEN,
            depth: 3,
            width: 32,
            train: TrainConfig {
                max_epochs: 400,
                learning_rate: 3e-3,
                weight_decay: 1e-3,
                standardize: false,
                ..TrainConfig::default()
            },
        }
    }
}

/// Default amplitude list of the sweep.
pub const DEFAULT_AMPLITUDES: [f64; 8] = [0.5, 1.0, 2.0, 4.5, 5.0, 6.0, 8.0, 10.5];
pub const DEFAULT_SIZES: [usize; 5] = [32, 64, 128, 256, 512];

fn split(signals: &[LabeledSignal]) -> (Vec<Vec<f64>>, Vec<f64>) {
    signals.iter().map(|s| (s.samples.clone(), s.alpha_target)).unzip()
}

/// Trains on `n` multiscale signals and evaluates on a copy with a noisy
/// subset. The α draws depend only on `seed`, so amplitudes give scaled
/// copies of one another.
pub fn gengap_experiment(
    n: usize,
    amplitude: f64,
    level: usize,
    seed: u64,
    cfg: &GenGapConfig,
) -> Result<GenGapRecord> {
    if n < 2 || n > cfg.pool_size {
        return Err(Error::invalid(format!("n must lie in [2, {}], got {n}", cfg.pool_size)));
    }
    if !(0.0..=1.0).contains(&cfg.noise_fraction) {
        return Err(Error::invalid(format!("noise fraction must lie in [0, 1], got {}", cfg.noise_fraction)));
    }
    let proj = if level > 0 {
        Some(WaveletProjector::new(cfg.family, level, cfg.signal_len)?)
    } else {
        if !cfg.signal_len.is_power_of_two() {
            return Err(Error::invalid("signal length must be a power of two"));
        }
        None
    };
    let t = datasets::time_grid(cfg.signal_len, true);
    let pool = datasets::multiscale_dataset(cfg.pool_size, amplitude, &t, derive_seed(seed, &[1]))?;
    let (noisy, _) = datasets::add_noise(
        &pool[..n],
        cfg.noise_fraction,
        cfg.noise_sigma,
        derive_seed(seed, &[2, n as u64]),
    )?;

    let (mut pool_x, _) = split(&pool);
    let (mut test_x, targets) = split(&noisy);
    if let Some(p) = &proj {
        pool_x = p.project_all(&pool_x)?;
        test_x = p.project_all(&test_x)?;
    }
    let train_x = &pool_x[..n];
    let diameter = wavelets::diameter(&pool_x)?;

    let spec = MlpSpec::new(cfg.signal_len, cfg.depth, cfg.width)?;
    let init = MlpNetwork::init(&spec, derive_seed(seed, &[3]));
    let tcfg = TrainConfig {
        seed: derive_seed(seed, &[4]),
        ..cfg.train.clone()
    };
    let trained = net::train(&init, train_x, &targets, None, &tcfg)?.net;
    let (_, loss_train) = net::evaluate(&trained, train_x, &targets)?;
    let (_, loss_test) = net::evaluate(&trained, &test_x, &targets)?;
    Ok(GenGapRecord {
        n,
        amplitude,
        level,
        seed,
        loss_train,
        loss_test,
        gengap: (loss_train - loss_test).abs(),
        diameter,
        bound: diameter / (n as f64).sqrt(),
    })
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub beta_hat: f64,
    /// `2 · max |F - α|` over the probe set and both models.
    pub l_loss: f64,
    /// Largest empirical Lipschitz estimate of the two models.
    pub l_f: f64,
    pub diameter: f64,
    pub bound: f64,
}

/// Trains on `T` and on `T` with sample `index` replaced, from the same
/// initialization and configuration, and compares the squared losses on
/// the probe set.
#[allow(clippy::too_many_arguments)]
pub fn stability_probe(
    inputs: &[Vec<f64>],
    targets: &[f64],
    index: usize,
    replacement: (&[f64], f64),
    probe: (&[Vec<f64>], &[f64]),
    init: &MlpNetwork,
    cfg: &TrainConfig,
) -> Result<StabilityReport> {
    if index >= inputs.len() {
        return Err(Error::invalid(format!("replace index {index} out of range")));
    }
    if probe.0.is_empty() || probe.0.len() != probe.1.len() {
        return Err(Error::invalid("probe set must be nonempty with one target per input"));
    }
    let mut alt_x = inputs.to_vec();
    let mut alt_y = targets.to_vec();
    alt_x[index] = replacement.0.to_vec();
    alt_y[index] = replacement.1;
    let a = net::train(init, inputs, targets, None, cfg)?.net;
    let b = net::train(init, &alt_x, &alt_y, None, cfg)?.net;

    let mut beta: f64 = 0.0;
    let mut max_err: f64 = 0.0;
    for (s, y) in probe.0.iter().zip(probe.1) {
        let (fa, fb) = (a.forward(s)?, b.forward(s)?);
        beta = beta.max(((fa - y).powi(2) - (fb - y).powi(2)).abs());
        max_err = max_err.max((fa - y).abs()).max((fb - y).abs());
    }
    let mut all = inputs.to_vec();
    all.push(replacement.0.to_vec());
    let l_f = if all.len() >= 2 {
        a.lipschitz_empirical(&all)?.max(b.lipschitz_empirical(&all)?)
    } else {
        0.0
    };
    let diameter = wavelets::diameter(&all)?;
    let l_loss = 2.0 * max_err;
    Ok(StabilityReport {
        beta_hat: beta,
        l_loss,
        l_f,
        diameter,
        bound: l_loss * l_f * diameter,
    })
}

/// Settings of the HP-spline reconstructions inside the audits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplineConfig {
    pub lambda: f64,
    pub knot_step: f64,
}

impl Default for SplineConfig {
    fn default() -> Self {
        Self {
            lambda: 0.1,
            knot_step: 0.1,
        }
    }
}

/// Values on `t` of the HP-spline fit of `s` at `alpha`.
fn fit_values(t: &[f64], s: &[f64], alpha: f64, spline: &SplineConfig, cache: &BasisCache) -> Result<Vec<f64>> {
    let knots = UniformKnots::spanning(t[0], t[t.len() - 1], spline.knot_step)?;
    let basis = cache.get(alpha, knots)?;
    hpfit::fit_with_basis(basis, t, s, spline.lambda)?.evaluate(t)
}

fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Point {
    pub x: f64,
    pub alpha: f64,
    pub alpha_pred: f64,
    pub err_pred: f64,
    pub err_nominal: f64,
    pub near_singular: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop1Report {
    pub alpha_fn: AlphaFunction,
    pub points: Vec<Prop1Point>,
    /// `sup |F - α|` away from the singular set.
    pub eps_hat: f64,
    /// Largest secant `‖s_hp(α̂) - s_hp(α)‖∞ / |α̂ - α|` over the grid.
    pub l_eff: f64,
    /// `L_eff · ε̂`
    pub propagation: f64,
    /// Smallest slope of the same kind (flat-region constant).
    pub l_flat: f64,
    /// Excess error per declared singular point.
    pub deltas: Vec<(f64, f64)>,
    pub holds: bool,
}

/// Half-width of the neighbourhood treated as singular around each point of E.
pub const SINGULAR_WINDOW: f64 = 0.02;

/// Checks `‖s - s_hp(F(s))‖ ≤ ‖s - s_hp(α(s))‖ + L_eff ε̂ + Σ δ_i` on a grid
/// with estimated constants.
pub fn audit_prop1(
    alpha_fn: AlphaFunction,
    predict: &dyn Fn(&[f64]) -> f64,
    spline: &SplineConfig,
    t: &[f64],
    grid: &[f64],
) -> Result<Prop1Report> {
    if grid.is_empty() || t.len() < 4 {
        return Err(Error::invalid("audit needs a nonempty grid and at least four time points"));
    }
    let cache = BasisCache::new();
    let singular = alpha_fn.singular_set();
    let mut points = Vec::with_capacity(grid.len());
    let mut eps_hat: f64 = 0.0;
    let mut l_eff: f64 = 0.0;
    let mut l_flat = f64::INFINITY;
    for &x in grid {
        let sig = datasets::exponential_signal(alpha_fn, x, t, 0)?;
        let alpha = sig.alpha_target;
        let alpha_pred = predict(&sig.samples);
        let nominal = fit_values(t, &sig.samples, alpha, spline, &cache)?;
        let predicted = fit_values(t, &sig.samples, alpha_pred, spline, &cache)?;
        let prop = sup_dist(&nominal, &predicted);
        let gap = (alpha_pred - alpha).abs();
        if gap > 0.0 {
            let slope = prop / gap;
            l_eff = l_eff.max(slope);
            l_flat = l_flat.min(slope);
        }
        let near = singular.iter().any(|e| (x - e).abs() <= SINGULAR_WINDOW);
        if !near {
            eps_hat = eps_hat.max(gap);
        }
        points.push(Prop1Point {
            x,
            alpha,
            alpha_pred,
            err_pred: sup_dist(&sig.samples, &predicted),
            err_nominal: sup_dist(&sig.samples, &nominal),
            near_singular: near,
        });
    }
    let propagation = l_eff * eps_hat;
    // δ_i: error near a singular point not covered by the smooth-region terms
    let deltas: Vec<(f64, f64)> = singular
        .iter()
        .map(|&e| {
            let excess = points
                .iter()
                .filter(|p| (p.x - e).abs() <= SINGULAR_WINDOW)
                .map(|p| (p.err_pred - p.err_nominal - propagation).max(0.0))
                .fold(0.0, f64::max);
            (e, excess)
        })
        .collect();
    let delta_sum: f64 = deltas.iter().map(|d| d.1).sum();
    let slack = 1e-12;
    let holds = points
        .iter()
        .all(|p| p.err_pred <= p.err_nominal + propagation + delta_sum + slack);
    Ok(Prop1Report {
        alpha_fn,
        points,
        eps_hat,
        l_eff,
        propagation,
        l_flat: if l_flat.is_finite() { l_flat } else { 0.0 },
        deltas,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundAudit {
    pub l_f_emp: f64,
    pub l_f_upper: f64,
    /// Largest `‖s_hp(α)(s) - s_hp(α')(s)‖ / |α - α'|` over audited pairs.
    pub l_hp_emp: f64,
    /// Largest `‖H_α (s - s')‖ / ‖s - s'‖` over audited pairs.
    pub l_s_emp: f64,
    pub composite_bound: f64,
    pub observed_composite: f64,
    pub holds: bool,
}

/// Compares the composite map `s ↦ s_hp(F(s))` with `L_s + L_α L_F`
/// on all pairs of `signals` (Euclidean norms).
pub fn bound_audit(net: &MlpNetwork, signals: &[Vec<f64>], t: &[f64], spline: &SplineConfig) -> Result<BoundAudit> {
    if signals.len() < 2 {
        return Err(Error::invalid("bound audit needs at least two signals"));
    }
    let cache = BasisCache::new();
    let alphas = net.predict(signals)?;
    let fits = signals
        .iter()
        .zip(&alphas)
        .map(|(s, &a)| fit_values(t, s, a, spline, &cache))
        .collect::<Result<Vec<_>>>()?;
    let l_f_emp = net.lipschitz_empirical(signals)?;
    let mut l_s: f64 = 0.0;
    let mut l_hp: f64 = 0.0;
    let mut observed: f64 = 0.0;
    for i in 0..signals.len() {
        for j in 0..signals.len() {
            if i == j {
                continue;
            }
            let ds = euclidean(&signals[i], &signals[j]);
            if ds == 0.0 {
                continue;
            }
            // same α, different data: the fit is linear in the data
            let diff: Vec<f64> = signals[i].iter().zip(&signals[j]).map(|(a, b)| a - b).collect();
            let hd = fit_values(t, &diff, alphas[i], spline, &cache)?;
            l_s = l_s.max(hd.iter().map(|v| v * v).sum::<f64>().sqrt() / ds);
            let da = (alphas[i] - alphas[j]).abs();
            if da > 0.0 {
                let other = fit_values(t, &signals[j], alphas[i], spline, &cache)?;
                l_hp = l_hp.max(euclidean(&other, &fits[j]) / da);
            }
            observed = observed.max(euclidean(&fits[i], &fits[j]) / ds);
        }
    }
    let composite_bound = l_s + l_hp * l_f_emp;
    Ok(BoundAudit {
        l_f_emp,
        l_f_upper: net.lipschitz_upper(),
        l_hp_emp: l_hp,
        l_s_emp: l_s,
        composite_bound,
        observed_composite: observed,
        holds: observed <= composite_bound * 1.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]) + 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 35.0]) - 1.0).abs() < 1e-15);
        assert_eq!(spearman(&[1.0, 2.0], &[5.0, 5.0]), 0.0);
    }

    #[test]
    fn record_fields_are_consistent() {
        let cfg = GenGapConfig {
            pool_size: 16,
            signal_len: 32,
            width: 4,
            train: TrainConfig {
                max_epochs: 5,
                ..TrainConfig::default()
            },
            ..GenGapConfig::default()
        };
        let r = gengap_experiment(8, 2.0, 0, 3, &cfg).unwrap();
        assert_eq!(r.gengap, (r.loss_train - r.loss_test).abs());
        assert_eq!(r.bound, r.diameter / 8f64.sqrt());
        let clean = GenGapConfig {
            noise_fraction: 0.0,
            ..cfg.clone()
        };
        assert_eq!(gengap_experiment(8, 2.0, 0, 3, &clean).unwrap().gengap, 0.0);
        assert!(gengap_experiment(8, 2.0, 6, 3, &cfg).is_err());
        assert!(gengap_experiment(64, 2.0, 0, 3, &cfg).is_err());
    }
}

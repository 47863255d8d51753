//! Signal and parameter-function generators for the experiments.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Input dimension of the exponential-signal experiments.
pub const SWEEP_DIM: usize = 32;
/// Length of the multiscale signals.
pub const MULTISCALE_LEN: usize = 256;
/// Frequency range of the multiscale signals.
pub const MULTISCALE_ALPHA_RANGE: (f64, f64) = (0.5, 5.0);

const A3_CUSP: f64 = 0.37;

/// Parameter functions `x ∈ [0, 1] ↦ α(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaFunction {
    /// `1 / (1 + x)`
    A1,
    /// `1 + sin(2πx) / 2`
    A2,
    /// `x² + |x - 0.37|^{3/2}`
    A3,
    /// piecewise quadratic with a jump at 0.65
    A4,
}

impl AlphaFunction {
    pub const ALL: [AlphaFunction; 4] = [Self::A1, Self::A2, Self::A3, Self::A4];

    pub fn id(&self) -> &'static str {
        match self {
            Self::A1 => "a1",
            Self::A2 => "a2",
            Self::A3 => "a3",
            Self::A4 => "a4",
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::invalid(format!("alpha functions are defined on [0, 1], got x = {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        match self {
            Self::A1 => 1.0 / (1.0 + x),
            Self::A2 => 1.0 + 0.5 * (2.0 * std::f64::consts::PI * x).sin(),
            Self::A3 => x * x + (x - A3_CUSP).abs().powf(1.5),
            Self::A4 => {
                if x <= 1.0 / 3.0 {
                    x * x
                } else if x <= 0.6 {
                    11.0 / 3.0 * x - 10.0 / 9.0
                } else if x <= 0.65 {
                    49.0 / 45.0
                } else {
                    // written as 3t² in the source; the variable is x
                    3.0 * x * x
                }
            }
        }
    }

    /// Points of reduced regularity.
    pub fn singular_set(&self) -> &'static [f64] {
        match self {
            Self::A1 | Self::A2 => &[],
            Self::A3 => &[A3_CUSP],
            Self::A4 => &[1.0 / 3.0, 0.6, 0.65],
        }
    }
}

impl fmt::Display for AlphaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for AlphaFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a1" => Ok(Self::A1),
            "a2" => Ok(Self::A2),
            "a3" => Ok(Self::A3),
            "a4" => Ok(Self::A4),
            other => Err(Error::invalid(format!("unknown alpha function '{other}'"))),
        }
    }
}

/// Where a signal came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: u64,
    /// Abscissa `x` for signals drawn from a parameter function.
    pub x: Option<f64>,
}

/// One sampled signal with its target frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledSignal {
    pub samples: Vec<f64>,
    pub alpha_target: f64,
    pub provenance: Provenance,
}

impl LabeledSignal {
    pub fn new(samples: Vec<f64>, alpha_target: f64, generator: impl Into<String>, seed: u64) -> Self {
        Self {
            samples,
            alpha_target,
            provenance: Provenance {
                generator: generator.into(),
                seed,
                x: None,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `d` uniform points on `[0, 1]`; with `include_end = false` the grid is
/// `i / d` instead of `i / (d - 1)`.
pub fn time_grid(d: usize, include_end: bool) -> Vec<f64> {
    assert!(d >= 2, "time grid needs at least two points");
    let denom = if include_end { (d - 1) as f64 } else { d as f64 };
    (0..d).map(|i| i as f64 / denom).collect()
}

/// How the abscissae `x_i` of a sweep dataset are placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XSampling {
    /// `x_i = i / (n - 1)`
    Grid,
    /// i.i.d. uniform draws
    Random,
}

pub fn sweep_abscissae(n: usize, sampling: XSampling, seed: u64) -> Vec<f64> {
    match sampling {
        XSampling::Grid if n == 1 => vec![0.0],
        XSampling::Grid => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        XSampling::Random => {
            let mut rng = seeds::rng(seed);
            (0..n).map(|_| rng.random::<f64>()).collect()
        }
    }
}

/// Validation abscissae `(k + 1/2) / n`; they never coincide with a
/// training grid `i / (N - 1)` when `N - 1` is odd.
pub fn validation_abscissae(n: usize) -> Vec<f64> {
    (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect()
}

/// `e^{-α t}` sampled on `t`, labelled with `α = f(x)`.
pub fn exponential_signal(f: AlphaFunction, x: f64, t: &[f64], seed: u64) -> Result<LabeledSignal> {
    let alpha = f.eval(x)?;
    let mut sig = LabeledSignal::new(
        t.iter().map(|ti| (-alpha * ti).exp()).collect(),
        alpha,
        format!("sweep-{}", f.id()),
        seed,
    );
    sig.provenance.x = Some(x);
    Ok(sig)
}

pub fn make_sweep_dataset(
    f: AlphaFunction,
    xs: &[f64],
    t: &[f64],
    seed: u64,
) -> Result<Vec<LabeledSignal>> {
    if xs.is_empty() {
        return Err(Error::invalid("sweep dataset needs at least one abscissa"));
    }
    xs.iter().map(|&x| exponential_signal(f, x, t, seed)).collect()
}

/// `A Σ_{k=1}^{5} 2^{-kα} cos(2^k π t)`.
pub fn make_multiscale(amplitude: f64, alpha: f64, t: &[f64], seed: u64) -> Result<LabeledSignal> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::invalid(format!("amplitude must be positive, got {amplitude}")));
    }
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite"));
    }
    let samples = t
        .iter()
        .map(|&ti| {
            amplitude
                * (1..=5)
                    .map(|k| {
                        let kf = k as f64;
                        (-kf * alpha).exp2() * (kf.exp2() * std::f64::consts::PI * ti).cos()
                    })
                    .sum::<f64>()
        })
        .collect();
    Ok(LabeledSignal::new(samples, alpha, "multiscale", seed))
}

/// `n` multiscale signals with `α ~ U[0.5, 5]`.
pub fn multiscale_dataset(n: usize, amplitude: f64, t: &[f64], seed: u64) -> Result<Vec<LabeledSignal>> {
    let mut rng = seeds::rng(seed);
    let (lo, hi) = MULTISCALE_ALPHA_RANGE;
    (0..n)
        .map(|_| {
            let alpha = rng.random_range(lo..=hi);
            make_multiscale(amplitude, alpha, t, seed)
        })
        .collect()
}

/// Signal families of the comparison scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    /// `A e^{αt}`
    S1,
    /// `A t e^{-αt}`
    S2,
    /// `(t/2) e^{-2α} + e^{-αt/2}`; the first term is linear in `t`
    S3,
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" => Ok(Self::S1),
            "s2" => Ok(Self::S2),
            "s3" => Ok(Self::S3),
            other => Err(Error::invalid(format!("unknown scenario signal '{other}'"))),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::S1 => "s1",
            Self::S2 => "s2",
            Self::S3 => "s3",
        })
    }
}

pub fn make_scenario_signal(kind: ScenarioKind, amplitude: f64, alpha: f64, t: &[f64]) -> LabeledSignal {
    let samples = t
        .iter()
        .map(|&ti| match kind {
            ScenarioKind::S1 => amplitude * (alpha * ti).exp(),
            ScenarioKind::S2 => amplitude * ti * (-alpha * ti).exp(),
            ScenarioKind::S3 => 0.5 * ti * (-2.0 * alpha).exp() + (-0.5 * alpha * ti).exp(),
        })
        .collect();
    LabeledSignal::new(samples, alpha, kind.to_string(), 0)
}

/// Adds i.i.d. `N(0, σ²)` noise to every sample of a seeded random subset of
/// `⌊fraction·n⌋` signals. Targets are left unchanged. Returns the noisy
/// copy and the sorted indices that were perturbed.
pub fn add_noise(
    signals: &[LabeledSignal],
    fraction: f64,
    sigma: f64,
    seed: u64,
) -> Result<(Vec<LabeledSignal>, Vec<usize>)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid(format!("noise fraction must lie in [0, 1], got {fraction}")));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let n = signals.len();
    let count = (fraction * n as f64 + 1e-9).floor() as usize;
    let mut rng = seeds::rng(seed);
    let mut chosen: Vec<usize> = sample(&mut rng, n, count.min(n)).into_vec();
    chosen.sort_unstable();
    let normal = Normal::new(0.0, sigma).expect("sigma validated above");
    let mut out = signals.to_vec();
    for &i in &chosen {
        for v in out[i].samples.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }
    Ok((out, chosen))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_functions_at_anchor_points() {
        assert_eq!(AlphaFunction::A1.eval(0.0).unwrap(), 1.0);
        assert_eq!(AlphaFunction::A2.eval(0.0).unwrap(), 1.0);
        assert_eq!(AlphaFunction::A3.eval(0.37).unwrap(), 0.37 * 0.37);
        assert!(AlphaFunction::A1.eval(1.5).is_err());
        assert!(AlphaFunction::A4.eval(-0.1).is_err());
    }

    #[test]
    fn a4_branches() {
        let f = AlphaFunction::A4;
        assert!((f.eval(1.0 / 3.0).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!((f.eval(0.6).unwrap() - 49.0 / 45.0).abs() < 1e-12);
        assert_eq!(f.eval(0.65).unwrap(), 49.0 / 45.0);
        let right = f.eval(0.65 + 1e-12).unwrap();
        assert!((right - 3.0 * 0.65 * 0.65).abs() < 1e-10);
        for x in [0.0, 0.2, 0.5, 0.62, 0.9, 1.0] {
            assert!(f.eval(x).unwrap().is_finite());
        }
    }

    #[test]
    fn a3_loses_second_derivative_at_cusp() {
        let f = AlphaFunction::A3;
        let second = |h: f64| {
            (f.eval(0.37 + h).unwrap() - 2.0 * f.eval(0.37).unwrap() + f.eval(0.37 - h).unwrap()) / (h * h)
        };
        let coarse = second(1e-2);
        let fine = second(1e-4);
        assert!(fine > 5.0 * coarse, "{coarse} {fine}");
        // first derivative stays bounded (C¹)
        let slope = |h: f64| (f.eval(0.37 + h).unwrap() - f.eval(0.37 - h).unwrap()) / (2.0 * h);
        assert!((slope(1e-3) - slope(1e-5)).abs() < 1e-3);
    }

    #[test]
    fn sweep_dataset_range_and_determinism() {
        let t = time_grid(SWEEP_DIM, true);
        let xs = sweep_abscissae(1000, XSampling::Grid, 0);
        let data = make_sweep_dataset(AlphaFunction::A1, &xs, &t, 0).unwrap();
        let (lo, hi) = data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), s| {
            (l.min(s.alpha_target), h.max(s.alpha_target))
        });
        assert_eq!(lo, 0.5);
        assert_eq!(hi, 1.0);
        let a = exponential_signal(AlphaFunction::A2, 0.4, &t, 1).unwrap();
        let b = exponential_signal(AlphaFunction::A2, 0.4, &t, 1).unwrap();
        assert_eq!(a, b);
        assert!(data.iter().all(|s| s.len() == SWEEP_DIM));
    }

    #[test]
    fn validation_points_avoid_the_training_grid() {
        let train = sweep_abscissae(1000, XSampling::Grid, 0);
        for v in validation_abscissae(200) {
            assert!(train.iter().all(|x| (x - v).abs() > 1e-6));
        }
    }

    #[test]
    fn multiscale_values() {
        let t = time_grid(MULTISCALE_LEN, true);
        let s = make_multiscale(2.0, 1.3, &t, 0).unwrap();
        let s0: f64 = (1..=5).map(|k| (-(k as f64) * 1.3).exp2()).sum();
        assert!((s.samples[0] - 2.0 * s0).abs() < 1e-14);
        let doubled = make_multiscale(4.0, 1.3, &t, 0).unwrap();
        for (a, b) in s.samples.iter().zip(&doubled.samples) {
            assert!((2.0 * a - b).abs() < 1e-14);
        }
        let bound = 2.0 * s0;
        assert!(s.samples.iter().all(|v| v.abs() <= bound + 1e-14));
        assert!(make_multiscale(0.0, 1.0, &t, 0).is_err());
    }

    #[test]
    fn multiscale_large_alpha_is_dominated_by_first_term() {
        // term k relative to term 1 is 2^{-(k-1)α}
        let t = time_grid(MULTISCALE_LEN, true);
        let alpha: f64 = 20.0;
        let s = make_multiscale(1.0, alpha, &t, 0).unwrap();
        let lead = alpha.exp2().recip();
        for (ti, v) in t.iter().zip(&s.samples) {
            let first = lead * (2.0 * std::f64::consts::PI * ti).cos();
            assert!((v - first).abs() <= 2.0 * lead * (-alpha).exp2());
        }
    }

    #[test]
    fn scenario_signals_at_origin() {
        let t = time_grid(SWEEP_DIM, true);
        let s1 = make_scenario_signal(ScenarioKind::S1, 1.0, 0.0, &t);
        assert!(s1.samples.iter().all(|v| *v == 1.0));
        assert_eq!(make_scenario_signal(ScenarioKind::S2, 2.0, 1.0, &t).samples[0], 0.0);
        assert_eq!(make_scenario_signal(ScenarioKind::S3, 1.0, 3.0, &t).samples[0], 1.0);
    }

    #[test]
    fn noise_subset_sizes() {
        let t = time_grid(8, true);
        let xs = sweep_abscissae(10, XSampling::Grid, 0);
        let data = make_sweep_dataset(AlphaFunction::A1, &xs, &t, 0).unwrap();
        let (same, idx) = add_noise(&data, 0.0, 0.01, 3).unwrap();
        assert_eq!(same, data);
        assert!(idx.is_empty());
        let (same, idx) = add_noise(&data, 1.0, 0.0, 3).unwrap();
        assert_eq!(same, data);
        assert_eq!(idx.len(), 10);
        let (noisy, idx) = add_noise(&data, 0.3, 0.01, 3).unwrap();
        assert_eq!(idx.len(), 3);
        let changed = noisy.iter().zip(&data).filter(|(a, b)| a.samples != b.samples).count();
        assert_eq!(changed, 3);
        assert!(noisy.iter().zip(&data).all(|(a, b)| a.alpha_target == b.alpha_target));
        assert!(add_noise(&data, 1.5, 0.01, 3).is_err());
    }
}

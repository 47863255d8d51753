//! Periodic orthonormal wavelet transforms and the approximation projector `V_J`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::euclidean;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletFamily {
    Haar,
    /// Daubechies, four taps.
    D4,
}

impl WaveletFamily {
    fn lowpass(&self) -> &'static [f64] {
        const S2: f64 = std::f64::consts::FRAC_1_SQRT_2;
        // (1 ± √3), (3 ± √3) over 4√2
        const D4: [f64; 4] = [
            0.482_962_913_144_534_16,
            0.836_516_303_737_807_9,
            0.224_143_868_042_013_4,
            -0.129_409_522_551_260_37,
        ];
        match self {
            Self::Haar => &[S2, S2],
            Self::D4 => &D4,
        }
    }

    fn highpass(&self) -> Vec<f64> {
        let h = self.lowpass();
        let n = h.len();
        (0..n)
            .map(|k| if k % 2 == 0 { h[n - 1 - k] } else { -h[n - 1 - k] })
            .collect()
    }
}

impl FromStr for WaveletFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "haar" => Ok(Self::Haar),
            "d4" | "db2" | "daubechies4" => Ok(Self::D4),
            other => Err(Error::invalid(format!("unknown wavelet family '{other}'"))),
        }
    }
}

impl fmt::Display for WaveletFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Haar => "haar",
            Self::D4 => "d4",
        })
    }
}

fn check_len(n: usize, level: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::invalid(format!("signal length must be a power of two >= 2, got {n}")));
    }
    if level > n.trailing_zeros() as usize {
        return Err(Error::invalid(format!("level {level} exceeds log2 of the signal length {n}")));
    }
    Ok(())
}

fn analysis_step(x: &[f64], h: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut a = vec![0.0; half];
    let mut d = vec![0.0; half];
    for i in 0..half {
        for k in 0..h.len() {
            let v = x[(2 * i + k) % n];
            a[i] += h[k] * v;
            d[i] += g[k] * v;
        }
    }
    (a, d)
}

fn synthesis_step(a: &[f64], d: &[f64], h: &[f64], g: &[f64]) -> Vec<f64> {
    let n = 2 * a.len();
    let mut x = vec![0.0; n];
    for i in 0..a.len() {
        for k in 0..h.len() {
            x[(2 * i + k) % n] += h[k] * a[i] + g[k] * d[i];
        }
    }
    x
}

/// `J`-level transform laid out as `[a_J, d_J, d_{J-1}, ..., d_1]`.
pub fn dwt(family: WaveletFamily, s: &[f64], level: usize) -> Result<Vec<f64>> {
    check_len(s.len(), level)?;
    let (h, g) = (family.lowpass(), family.highpass());
    let mut out = s.to_vec();
    let mut len = s.len();
    for _ in 0..level {
        let (a, d) = analysis_step(&out[..len], h, &g);
        out[..len / 2].copy_from_slice(&a);
        out[len / 2..len].copy_from_slice(&d);
        len /= 2;
    }
    Ok(out)
}

pub fn idwt(family: WaveletFamily, c: &[f64], level: usize) -> Result<Vec<f64>> {
    check_len(c.len(), level)?;
    let (h, g) = (family.lowpass(), family.highpass());
    let mut out = c.to_vec();
    let mut len = c.len() >> level;
    for _ in 0..level {
        let x = synthesis_step(&out[..len], &out[len..2 * len], h, &g);
        out[..2 * len].copy_from_slice(&x);
        len *= 2;
    }
    Ok(out)
}

/// Orthogonal projection onto the level-`J` approximation space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaveletProjector {
    pub family: WaveletFamily,
    pub level: usize,
    pub signal_len: usize,
}

impl WaveletProjector {
    pub fn new(family: WaveletFamily, level: usize, signal_len: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("projection level must be >= 1"));
        }
        check_len(signal_len, level)?;
        Ok(Self {
            family,
            level,
            signal_len,
        })
    }

    pub fn project(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.signal_len {
            return Err(Error::invalid(format!(
                "projector expects length {}, got {}",
                self.signal_len,
                s.len()
            )));
        }
        let mut c = dwt(self.family, s, self.level)?;
        let keep = self.signal_len >> self.level;
        c[keep..].iter_mut().for_each(|v| *v = 0.0);
        idwt(self.family, &c, self.level)
    }

    pub fn project_all(&self, signals: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        signals.iter().map(|s| self.project(s)).collect()
    }
}

/// Largest pairwise Euclidean distance.
pub fn diameter(signals: &[Vec<f64>]) -> Result<f64> {
    if signals.len() < 2 {
        return Err(Error::invalid("diameter needs at least two signals"));
    }
    let n = signals[0].len();
    if signals.iter().any(|s| s.len() != n) {
        return Err(Error::invalid("signals differ in length"));
    }
    let mut best = 0.0_f64;
    for i in 0..signals.len() {
        for j in i + 1..signals.len() {
            best = best.max(euclidean(&signals[i], &signals[j]));
        }
    }
    Ok(best)
}

pub fn diameter_projected(signals: &[Vec<f64>], proj: &WaveletProjector) -> Result<f64> {
    if signals.len() < 2 {
        return Err(Error::invalid("diameter needs at least two signals"));
    }
    diameter(&proj.project_all(signals)?)
}

//! Grid search for the frequency that best fits a signal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hbasis::UniformKnots;
use crate::hpfit::{self, BasisCache};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlphaSearchConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Number of log-spaced grid points.
    pub grid_size: usize,
    /// Golden-section refinement around the best grid cell.
    pub refine: bool,
    pub refine_tol: f64,
    pub lambda: f64,
    pub knot_step: f64,
    /// Fit with frequency `-α` for each candidate `α`, for growing
    /// exponentials `e^{αt}`. Reported values stay positive.
    pub negate: bool,
}

impl Default for AlphaSearchConfig {
    fn default() -> Self {
        Self {
            alpha_min: 0.05,
            alpha_max: 10.0,
            grid_size: 200,
            refine: true,
            refine_tol: 1e-4,
            lambda: 0.1,
            knot_step: 0.1,
            negate: false,
        }
    }
}

impl AlphaSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_min > 0.0 && self.alpha_max > self.alpha_min && self.alpha_max.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha range must satisfy 0 < min < max, got [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::invalid("alpha grid needs at least two points"));
        }
        if !(self.refine_tol > 0.0) || !(self.knot_step > 0.0) || !(self.lambda >= 0.0) {
            return Err(Error::invalid("refine_tol and knot_step must be positive, lambda non-negative"));
        }
        Ok(())
    }

    /// Frequency passed to the fit for candidate `alpha`.
    pub fn signed(&self, alpha: f64) -> f64 {
        if self.negate {
            -alpha
        } else {
            alpha
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = (self.alpha_min.ln(), self.alpha_max.ln());
        let n = self.grid_size;
        (0..n)
            .map(|i| {
                if i == 0 {
                    self.alpha_min
                } else if i == n - 1 {
                    self.alpha_max
                } else {
                    (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSearchResult {
    pub alpha: f64,
    pub sse: f64,
    /// Best grid point before refinement.
    pub grid_alpha: f64,
    pub grid_sse: f64,
    pub refined: bool,
}

/// Data sse of the HP-spline fit at `alpha`.
pub fn sse_at(t: &[f64], y: &[f64], alpha: f64, lambda: f64, knots: UniformKnots) -> Result<f64> {
    Ok(hpfit::fit(t, y, alpha, lambda, knots)?.sse())
}

pub fn knots_for(t: &[f64], knot_step: f64) -> Result<UniformKnots> {
    let (Some(&lo), Some(&hi)) = (t.first(), t.last()) else {
        return Err(Error::invalid("empty abscissa vector"));
    };
    UniformKnots::spanning(lo, hi, knot_step)
}

pub fn optimal_alpha(t: &[f64], y: &[f64], cfg: &AlphaSearchConfig) -> Result<AlphaSearchResult> {
    optimal_alpha_cached(t, y, cfg, &BasisCache::new())
}

/// As [`optimal_alpha`], reusing bases for grid points across calls.
pub fn optimal_alpha_cached(
    t: &[f64],
    y: &[f64],
    cfg: &AlphaSearchConfig,
    cache: &BasisCache,
) -> Result<AlphaSearchResult> {
    cfg.validate()?;
    let knots = knots_for(t, cfg.knot_step)?;
    let grid = cfg.grid();
    let scores: Vec<Result<f64>> = grid
        .par_iter()
        .map(|&a| {
            let basis = cache.get(cfg.signed(a), knots)?;
            Ok(hpfit::fit_with_basis(basis, t, y, cfg.lambda)?.sse())
        })
        .collect();

    let mut best: Option<(usize, f64)> = None;
    let mut last_err = None;
    for (i, s) in scores.into_iter().enumerate() {
        match s {
            // strict comparison keeps the smaller alpha on ties
            Ok(v) if best.is_none_or(|(_, b)| v < b) => best = Some((i, v)),
            Ok(_) => {}
            Err(e) => {
                if matches!(e, Error::InvalidInput(_) | Error::OutOfRange { .. }) {
                    return Err(e);
                }
                last_err = Some(e);
            }
        }
    }
    let Some((i, grid_sse)) = best else {
        let e = last_err.unwrap_or_else(|| Error::invalid("empty alpha grid"));
        return Err(Error::SearchFailed(Box::new(e)));
    };
    let grid_alpha = grid[i];
    let mut result = AlphaSearchResult {
        alpha: grid_alpha,
        sse: grid_sse,
        grid_alpha,
        grid_sse,
        refined: false,
    };
    if cfg.refine && grid_sse > 0.0 {
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(grid.len() - 1)];
        let f = |a: f64| sse_at(t, y, cfg.signed(a), cfg.lambda, knots).unwrap_or(f64::INFINITY);
        let (a, s) = golden_section(f, lo, hi, cfg.refine_tol);
        if s < grid_sse {
            result.alpha = a;
            result.sse = s;
            result.refined = true;
        }
    }
    Ok(result)
}

/// Minimizes `f` on `[lo, hi]` to bracket width `tol`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

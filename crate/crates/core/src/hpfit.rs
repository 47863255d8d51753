//! Penalized least-squares fitting in the hyperbolic B-spline basis.
//!
//! The HP-spline minimises
//! `Σ_i (y_i - Σ_j a_j B_j(t_i))² + λ² Σ_j ((Δ a)_j)²`
//! where `Δ` is the α-dependent second difference
//! `(Δ a)_j = a_j - 2e^{-αh} a_{j-1} + e^{-2αh} a_{j-2}`. The problem is
//! solved as one least-squares system on the stacked matrix `[B; λD]`
//! through a Householder QR factorisation.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hbasis::{HyperbolicBasis, UniformKnots};

/// Relative threshold on `|R_ii|` below which a column counts as dependent.
const RANK_TOL: f64 = 1e-11;

/// Banded `m x (m+2)` matrix of the α-dependent second difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyMatrix {
    alpha: f64,
    h: f64,
    m: usize,
    stencil: [f64; 3],
}

impl PenaltyMatrix {
    pub fn new(alpha: f64, h: f64, m: usize) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("knot step must be positive, got {h}")));
        }
        if m < 2 {
            return Err(Error::invalid(format!("penalty needs m >= 2, got {m}")));
        }
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        let r = (-alpha * h).exp();
        Ok(Self {
            alpha,
            h,
            m,
            stencil: [r * r, -2.0 * r, 1.0],
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.m + 2
    }

    /// Row nonzeros `[e^{-2αh}, -2e^{-αh}, 1]` at columns `(r, r+1, r+2)`.
    pub fn stencil(&self) -> [f64; 3] {
        self.stencil
    }

    pub fn apply(&self, a: &[f64]) -> Vec<f64> {
        assert_eq!(a.len(), self.cols(), "coefficient length mismatch");
        a.windows(3)
            .map(|w| self.stencil[0] * w[0] + self.stencil[1] * w[1] + self.stencil[2] * w[2])
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.rows(), self.cols());
        for r in 0..self.rows() {
            for (k, &w) in self.stencil.iter().enumerate() {
                d[(r, r + k)] = w;
            }
        }
        d
    }
}

/// A fitted HP-spline.
#[derive(Clone, Debug)]
pub struct HpSpline {
    alpha: f64,
    lambda: f64,
    coeffs: Vec<f64>,
    basis: Arc<HyperbolicBasis>,
    sse: f64,
    penalty_value: f64,
}

impl HpSpline {
    /// Spline with given coefficients and no associated data (`sse = 0`).
    pub fn from_coefficients(basis: Arc<HyperbolicBasis>, lambda: f64, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        let penalty = PenaltyMatrix::new(basis.alpha(), basis.knots().h(), basis.knots().m())?;
        let penalty_value = penalty.apply(&coeffs).iter().map(|v| v * v).sum();
        Ok(Self {
            alpha: basis.alpha(),
            lambda,
            coeffs,
            basis,
            sse: 0.0,
            penalty_value,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn basis(&self) -> &HyperbolicBasis {
        &self.basis
    }

    /// Sum of squared data residuals.
    pub fn sse(&self) -> f64 {
        self.sse
    }

    /// Unweighted penalty `‖D a‖²`.
    pub fn penalty_value(&self) -> f64 {
        self.penalty_value
    }

    /// `sse + λ² ‖D a‖²`.
    pub fn objective(&self) -> f64 {
        self.sse + self.lambda * self.lambda * self.penalty_value
    }

    pub fn evaluate(&self, t_points: &[f64]) -> Result<Vec<f64>> {
        t_points.iter().map(|&t| self.evaluate_at(t)).collect()
    }

    pub fn evaluate_at(&self, t: f64) -> Result<f64> {
        Ok(self.basis.row(t)?.map(|(j, b)| self.coeffs[j] * b).sum())
    }
}

/// Shared read-mostly cache of bases keyed by `(α, knot layout)`.
#[derive(Debug, Default)]
pub struct BasisCache {
    inner: RwLock<HashMap<(u64, u64, u64, usize), Arc<HyperbolicBasis>>>,
}

impl BasisCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, alpha: f64, knots: UniformKnots) -> Result<Arc<HyperbolicBasis>> {
        let key = (
            alpha.to_bits(),
            knots.t_start().to_bits(),
            knots.h().to_bits(),
            knots.m(),
        );
        if let Some(b) = self.inner.read().expect("basis cache poisoned").get(&key) {
            return Ok(Arc::clone(b));
        }
        let basis = Arc::new(HyperbolicBasis::build(alpha, knots)?);
        let mut guard = self.inner.write().expect("basis cache poisoned");
        Ok(Arc::clone(guard.entry(key).or_insert(basis)))
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("basis cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fit an HP-spline with frequency `alpha` and smoothing `lambda`.
pub fn fit(t: &[f64], y: &[f64], alpha: f64, lambda: f64, knots: UniformKnots) -> Result<HpSpline> {
    let basis = Arc::new(HyperbolicBasis::build(alpha, knots)?);
    fit_with_basis(basis, t, y, lambda)
}

/// Same as [`fit`] with a prebuilt basis.
pub fn fit_with_basis(basis: Arc<HyperbolicBasis>, t: &[f64], y: &[f64], lambda: f64) -> Result<HpSpline> {
    check_data(t, y, lambda)?;
    let n = basis.len();
    let knots = *basis.knots();
    let b = basis.design_matrix(t)?;
    let penalized = lambda > 0.0;
    let rows = t.len() + if penalized { knots.m() } else { 0 };
    if rows < n {
        return Err(Error::RankDeficient {
            rank: rows,
            cols: n,
            ratio: 0.0,
        });
    }

    let mut stacked = DMatrix::zeros(rows, n);
    stacked.rows_mut(0, t.len()).copy_from(&b);
    let penalty = PenaltyMatrix::new(basis.alpha(), knots.h(), knots.m())?;
    if penalized {
        let d = penalty.to_dense() * lambda;
        stacked.rows_mut(t.len(), knots.m()).copy_from(&d);
    }
    let mut rhs = DVector::zeros(rows);
    rhs.rows_mut(0, t.len()).copy_from_slice(y);

    let qr = stacked.qr();
    let r = qr.r();
    let diag_max = r.diagonal().amax();
    let diag_min = r.diagonal().iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let rank = r
        .diagonal()
        .iter()
        .filter(|v| v.abs() > RANK_TOL * diag_max)
        .count();
    if rank < n || diag_max == 0.0 {
        return Err(Error::RankDeficient {
            rank,
            cols: n,
            ratio: if diag_max > 0.0 { diag_min / diag_max } else { 0.0 },
        });
    }
    qr.q_tr_mul(&mut rhs);
    let top = rhs.rows(0, n).into_owned();
    let coeffs = r
        .solve_upper_triangular(&top)
        .ok_or_else(|| Error::RankDeficient {
            rank,
            cols: n,
            ratio: diag_min / diag_max,
        })?;

    let fitted = &b * &coeffs;
    let sse = y
        .iter()
        .zip(fitted.iter())
        .map(|(yi, fi)| (yi - fi) * (yi - fi))
        .sum();
    let coeffs: Vec<f64> = coeffs.iter().copied().collect();
    let penalty_value = penalty.apply(&coeffs).iter().map(|v| v * v).sum();
    Ok(HpSpline {
        alpha: basis.alpha(),
        lambda,
        coeffs,
        basis,
        sse,
        penalty_value,
    })
}

fn check_data(t: &[f64], y: &[f64], lambda: f64) -> Result<()> {
    if t.len() != y.len() {
        return Err(Error::invalid(format!(
            "t and y lengths differ ({} vs {})",
            t.len(),
            y.len()
        )));
    }
    if t.len() < 4 {
        return Err(Error::invalid(format!("need at least 4 data points, got {}", t.len())));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::invalid(format!("lambda must be >= 0, got {lambda}")));
    }
    if t.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("t must be sorted ascending"));
    }
    if t.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("data contain non-finite values"));
    }
    Ok(())
}

/// Reconstruction error metrics between a reference and a reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mse: f64,
    pub max_abs: f64,
    pub rel: f64,
}

pub fn reconstruction_metrics(reference: &[f64], reconstructed: &[f64]) -> Result<Metrics> {
    if reference.len() != reconstructed.len() || reference.is_empty() {
        return Err(Error::invalid(format!(
            "metric inputs must be nonempty and equal length ({} vs {})",
            reference.len(),
            reconstructed.len()
        )));
    }
    let mut sq = 0.0;
    let mut max_abs: f64 = 0.0;
    let mut ref_sq = 0.0;
    for (v, w) in reference.iter().zip(reconstructed) {
        let e = v - w;
        sq += e * e;
        max_abs = max_abs.max(e.abs());
        ref_sq += v * v;
    }
    if ref_sq == 0.0 {
        return Err(Error::invalid("relative error undefined for a zero reference"));
    }
    Ok(Metrics {
        mse: sq / reference.len() as f64,
        max_abs,
        rel: (sq / ref_sq).sqrt(),
    })
}

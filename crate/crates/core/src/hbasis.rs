//! Hyperbolic B-spline basis on uniform knots.
//!
//! Every basis function is a translate of one prototype supported on five
//! consecutive knots. Each of its four segments lies in
//! `span{e^{αt}, t e^{αt}, e^{-αt}, t e^{-αt}}`; the prototype is pinned down
//! by a 16x16 linear system (C² continuity at the three inner knots,
//! vanishing value/slope/curvature at both ends, and a centre-value
//! normalisation).
//!
//! Segments are stored in the scaled local basis
//!
//! ```text
//! f0(v) = cosh(a v)
//! f1(v) = sinh(a v) / a
//! f2(v) = v sinh(a v) / a
//! f3(v) = 3 (v cosh(a v) - sinh(a v) / a) / a²
//! ```
//!
//! with `v = (t - left knot) / h` and `a = α h`. These span the same space as
//! the raw exponentials but tend to `1, v, v², v³` as `a → 0`, so the system
//! stays well conditioned for small frequencies. The raw exponential
//! coefficients are available through
//! [`HyperbolicBasis::exponential_coefficients`].

use nalgebra::{DMatrix, DVector, SMatrix, SVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this `|α h|` the exact uniform cubic B-spline is used.
pub const ALPHA_SWITCH: f64 = 1e-4;

/// Above this `|α h|` the construction is rejected.
pub const MAX_ALPHA_H: f64 = 30.0;

/// Prototype value at the centre of its support (cubic B-spline convention).
pub const CENTER_VALUE: f64 = 2.0 / 3.0;

/// Uniform knots `ξ_k = t_start + (k - 1) h`, `k = 1..=m`.
///
/// Knots outside `1..=m` (three on each side) are generated on demand for
/// the boundary basis functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformKnots {
    t_start: f64,
    h: f64,
    m: usize,
}

impl UniformKnots {
    pub fn new(t_start: f64, h: f64, m: usize) -> Result<Self> {
        if !t_start.is_finite() {
            return Err(Error::invalid("knot origin must be finite"));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("knot step must be positive, got {h}")));
        }
        if m < 4 {
            return Err(Error::invalid(format!("need at least 4 knots, got {m}")));
        }
        Ok(Self { t_start, h, m })
    }

    /// Smallest uniform layout with step `h` starting at `lo` whose last knot
    /// reaches `hi`.
    pub fn spanning(lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::invalid(format!("invalid knot interval [{lo}, {hi}]")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("knot step must be positive, got {h}")));
        }
        let intervals = ((hi - lo) / h - 1e-9).ceil().max(1.0) as usize;
        Self::new(lo, h, (intervals + 1).max(4))
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of basis functions, `m + 2`.
    pub fn num_basis(&self) -> usize {
        self.m + 2
    }

    /// Knot `ξ_k` (1-based; extension knots for `k ≤ 0` or `k > m`).
    pub fn knot(&self, k: i64) -> f64 {
        self.t_start + (k - 1) as f64 * self.h
    }

    pub fn lo(&self) -> f64 {
        self.knot(1)
    }

    pub fn hi(&self) -> f64 {
        self.knot(self.m as i64)
    }

    pub(crate) fn contains(&self, t: f64) -> bool {
        let slack = 1e-12 * self.h.max(self.hi().abs()).max(self.lo().abs());
        t >= self.lo() - slack && t <= self.hi() + slack
    }
}

/// Above this `|α h|` segments are stored on decaying exponentials instead of
/// the scaled hyperbolic functions.
const EXP_FAMILY_SWITCH: f64 = 1.0;

/// Derivatives `0..=4` (with respect to `v`) of the local basis at `v`.
fn local_basis(a: f64, v: f64) -> [[f64; 4]; 5] {
    if a > EXP_FAMILY_SWITCH {
        exponential_local_basis(a, v)
    } else {
        hyperbolic_local_basis(a, v)
    }
}

/// `cosh(av), sinh(av)/a, v sinh(av)/a, 3(v cosh(av) - sinh(av)/a)/a²`.
fn hyperbolic_local_basis(a: f64, v: f64) -> [[f64; 4]; 5] {
    let x = a * v;
    let (c, s) = (x.cosh(), x.sinh());
    let a2 = a * a;
    // f1 = v * shc(x); d/dv f1 = cosh(x)
    let f1 = [v * shc(x), c, a * s, a2 * c, a2 * a * s];
    let f0 = [c, a * s, a2 * c, a2 * a * s, a2 * a2 * c];
    let f2 = [
        v * f1[0],
        f1[0] + v * f1[1],
        2.0 * f1[1] + v * f1[2],
        3.0 * f1[2] + v * f1[3],
        4.0 * f1[3] + v * f1[4],
    ];
    let f3 = [
        3.0 * v * v * v * hyp_q(x),
        3.0 * v * v * shc(x),
        3.0 * (v * shc(x) + v * c),
        3.0 * (2.0 * c + x * s),
        3.0 * (3.0 * a * s + a * x * c),
    ];
    let mut out = [[0.0; 4]; 5];
    for order in 0..5 {
        out[order] = [f0[order], f1[order], f2[order], f3[order]];
    }
    out
}

/// `e^{-av}, v e^{-av}, e^{a(v-1)}, (1-v) e^{a(v-1)}`: all bounded by 1 on
/// the segment, which keeps the system balanced for large `a`.
fn exponential_local_basis(a: f64, v: f64) -> [[f64; 4]; 5] {
    let left = (-a * v).exp();
    let right = (a * (v - 1.0)).exp();
    let mut out = [[0.0; 4]; 5];
    let mut pow_neg = 1.0; // (-a)^k
    let mut pow_pos = 1.0; // a^k
    for (k, row) in out.iter_mut().enumerate() {
        let kf = k as f64;
        let prev_neg = if k == 0 { 0.0 } else { pow_neg / -a };
        let prev_pos = if k == 0 { 0.0 } else { pow_pos / a };
        *row = [
            pow_neg * left,
            (pow_neg * v + kf * prev_neg) * left,
            pow_pos * right,
            ((1.0 - v) * pow_pos - kf * prev_pos) * right,
        ];
        pow_neg *= -a;
        pow_pos *= a;
    }
    out
}

/// `sinh(x) / x`, continuous at zero.
fn shc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

/// `(cosh x - sinh(x)/x) / x²`, continuous at zero (value 1/3).
fn hyp_q(x: f64) -> f64 {
    let x2 = x * x;
    if x.abs() < 0.1 {
        1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (1.0 / 840.0 + x2 * (1.0 / 45360.0 + x2 / 3991680.0)))
    } else {
        (x.cosh() - x.sinh() / x) / x2
    }
}

/// Cubic B-spline segments in the monomial basis `1, v, v², v³`.
const CUBIC_SEGMENTS: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, 1.0 / 6.0],
    [1.0 / 6.0, 0.5, 0.5, -0.5],
    [4.0 / 6.0, 0.0, -1.0, 0.5],
    [1.0 / 6.0, -0.5, 0.5, -1.0 / 6.0],
];

/// The `m + 2` hyperbolic B-splines for one frequency on one knot layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicBasis {
    alpha: f64,
    knots: UniformKnots,
    /// `|α h|` actually used in the local basis (0 in the cubic fallback).
    scaled_alpha: f64,
    segments: [[f64; 4]; 4],
    degenerate: bool,
    condition: f64,
}

impl HyperbolicBasis {
    pub fn build(alpha: f64, knots: UniformKnots) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
        }
        let alpha_h = (alpha * knots.h()).abs();
        if alpha_h > MAX_ALPHA_H {
            return Err(Error::SingularBasis {
                alpha_h,
                condition: f64::INFINITY,
            });
        }
        if alpha_h < ALPHA_SWITCH {
            return Ok(Self {
                alpha,
                knots,
                scaled_alpha: 0.0,
                segments: CUBIC_SEGMENTS,
                degenerate: true,
                condition: 1.0,
            });
        }
        let (segments, condition) = solve_prototype(alpha_h)?;
        Ok(Self {
            alpha,
            knots,
            scaled_alpha: alpha_h,
            segments,
            degenerate: false,
            condition,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn knots(&self) -> &UniformKnots {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.num_basis()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when the cubic-limit representation is in use.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// 2-norm condition estimate of the (row-equilibrated) construction system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Prototype segment coefficients in the scaled local basis.
    pub fn segments(&self) -> &[[f64; 4]; 4] {
        &self.segments
    }

    /// Centre of `B_j`, i.e. knot `ξ_j`.
    pub fn center(&self, j: usize) -> f64 {
        self.knots.knot(j as i64)
    }

    /// Left end of the support of `B_j`, knot `ξ_{j-2}`.
    pub fn support_start(&self, j: usize) -> f64 {
        self.knots.knot(j as i64 - 2)
    }

    /// `order`-th `v`-derivative (`order ≤ 4`) of prototype segment `seg` at
    /// local coordinate `v ∈ [0, 1]`, without the `1/h^order` factor.
    pub fn eval_segment(&self, seg: usize, v: f64, order: usize) -> f64 {
        let phi = local_basis(self.scaled_alpha, v)[order];
        self.segments[seg]
            .iter()
            .zip(phi.iter())
            .map(|(c, p)| c * p)
            .sum()
    }

    /// `order`-th derivative of `B_j` at `t` (`order ≤ 4`); exactly zero
    /// outside the open support.
    pub fn eval(&self, j: usize, t: f64, order: usize) -> f64 {
        assert!(order <= 4, "derivative order {order} not supported");
        let h = self.knots.h();
        if (t - self.center(j)).abs() >= 2.0 * h {
            return 0.0;
        }
        let x = (t - self.support_start(j)) / h;
        let seg = (x.floor().max(0.0) as usize).min(3);
        let v = x - seg as f64;
        self.eval_segment(seg, v, order) / h.powi(order as i32)
    }

    /// Dense `d x (m+2)` collocation matrix `B_j(t_i)`.
    pub fn design_matrix(&self, t_points: &[f64]) -> Result<DMatrix<f64>> {
        let mut b = DMatrix::zeros(t_points.len(), self.len());
        for (i, &t) in t_points.iter().enumerate() {
            for (j, value) in self.row(t)? {
                b[(i, j)] = value;
            }
        }
        Ok(b)
    }

    /// Nonzero entries of one collocation row (at most four).
    pub(crate) fn row(&self, t: f64) -> Result<impl Iterator<Item = (usize, f64)> + '_> {
        if !self.knots.contains(t) {
            return Err(Error::OutOfRange {
                t,
                lo: self.knots.lo(),
                hi: self.knots.hi(),
            });
        }
        let h = self.knots.h();
        // B_j is centred at ξ_j, so the candidates are the centres within 2h.
        let pos = (t - self.knots.t_start()) / h + 1.0;
        let first = (pos.floor() as i64 - 1).max(0) as usize;
        let last = (first + 4).min(self.len() - 1);
        Ok((first..=last).filter_map(move |j| {
            let value = self.eval(j, t, 0);
            (value != 0.0).then_some((j, value))
        }))
    }

    /// Samples of the prototype `B_0` over its support: `(t, B, B', B'')`,
    /// with `t` measured from the left support knot.
    pub fn sample_prototype(&self, samples: usize) -> Vec<[f64; 4]> {
        let h = self.knots.h();
        let n = samples.max(2);
        let left = self.support_start(0);
        (0..n)
            .map(|i| {
                let t = left + 4.0 * h * i as f64 / (n - 1) as f64;
                [
                    t - left,
                    self.eval(0, t, 0),
                    self.eval(0, t, 1),
                    self.eval(0, t, 2),
                ]
            })
            .collect()
    }

    /// Prototype segments in the raw local basis
    /// `{e^{αu}, u e^{αu}, e^{-αu}, u e^{-αu}}`, `u = t - left knot`.
    /// `None` in the cubic fallback, where that basis degenerates.
    pub fn exponential_coefficients(&self) -> Option<[[f64; 4]; 4]> {
        if self.degenerate {
            return None;
        }
        let h = self.knots.h();
        let a = self.scaled_alpha;
        // Rows: local basis functions expressed on (E+, uE+, E-, uE-) for |α|.
        let change = if a > EXP_FAMILY_SWITCH {
            let d = (-a).exp();
            [
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0 / h],
                [d, 0.0, 0.0, 0.0],
                [d, -d / h, 0.0, 0.0],
            ]
        } else {
            let (a2, a3) = (a * a, a * a * a);
            [
                [0.5, 0.0, 0.5, 0.0],
                [0.5 / a, 0.0, -0.5 / a, 0.0],
                [0.0, 0.5 / (a * h), 0.0, -0.5 / (a * h)],
                [-1.5 / a3, 1.5 / (a2 * h), 1.5 / a3, 1.5 / (a2 * h)],
            ]
        };
        let mut out = [[0.0; 4]; 4];
        for (seg, coeffs) in self.segments.iter().enumerate() {
            for (k, row) in change.iter().enumerate() {
                for (e, weight) in row.iter().enumerate() {
                    out[seg][e] += coeffs[k] * weight;
                }
            }
            if self.alpha < 0.0 {
                out[seg] = [out[seg][2], out[seg][3], out[seg][0], out[seg][1]];
            }
        }
        Some(out)
    }
}

fn solve_prototype(a: f64) -> Result<([[f64; 4]; 4], f64)> {
    let mut sys = SMatrix::<f64, 16, 16>::zeros();
    let mut rhs = SVector::<f64, 16>::zeros();
    let at0 = local_basis(a, 0.0);
    let at1 = local_basis(a, 1.0);
    let mut row = 0;
    // Vanishing value, slope and curvature at both ends of the support.
    for order in 0..3 {
        for k in 0..4 {
            sys[(row, k)] = at0[order][k];
            sys[(row + 1, 12 + k)] = at1[order][k];
        }
        row += 2;
    }
    // C² continuity at the three inner knots.
    for seg in 0..3 {
        for order in 0..3 {
            for k in 0..4 {
                sys[(row, 4 * seg + k)] = at1[order][k];
                sys[(row, 4 * (seg + 1) + k)] = -at0[order][k];
            }
            row += 1;
        }
    }
    // Centre value (start of segment 2).
    for k in 0..4 {
        sys[(row, 8 + k)] = at0[0][k];
    }
    rhs[row] = CENTER_VALUE;

    // Equilibrate columns then rows; the basis values span e^{±a} on a segment.
    let mut col_scale = [1.0; 16];
    for (c, scale) in col_scale.iter_mut().enumerate() {
        let s = sys.column(c).amax();
        if s > 0.0 {
            *scale = s;
            sys.column_mut(c).scale_mut(1.0 / s);
        }
    }
    for r in 0..16 {
        let scale = sys.row(r).amax();
        if scale > 0.0 {
            sys.row_mut(r).scale_mut(1.0 / scale);
            rhs[r] /= scale;
        }
    }
    let sv = DMatrix::from_iterator(16, 16, sys.iter().copied()).singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > 1e14 {
        return Err(Error::SingularBasis {
            alpha_h: a,
            condition,
        });
    }
    let sol = sys.lu().solve(&rhs).ok_or(Error::SingularBasis {
        alpha_h: a,
        condition,
    })?;
    let mut segments = [[0.0; 4]; 4];
    for seg in 0..4 {
        for k in 0..4 {
            segments[seg][k] = sol[4 * seg + k] / col_scale[4 * seg + k];
        }
    }
    Ok((segments, condition))
}

/// Least-squares coefficients of `f` sampled at `t` in the given basis,
/// solved through an SVD of the collocation matrix. Returns the coefficients
/// and the max absolute residual on the samples.
pub fn least_squares_reproduction(
    basis: &HyperbolicBasis,
    t: &[f64],
    f: impl Fn(f64) -> f64,
) -> Result<(Vec<f64>, f64)> {
    let b = basis.design_matrix(t)?;
    let y = DVector::from_iterator(t.len(), t.iter().map(|&ti| f(ti)));
    let svd = b.clone().svd(true, true);
    let coeffs = svd
        .solve(&y, 1e-13)
        .map_err(|e| Error::invalid(format!("reproduction solve failed: {e}")))?;
    let residual = (&b * &coeffs - &y).amax();
    Ok((coeffs.iter().copied().collect(), residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn knots(h: f64, m: usize) -> UniformKnots {
        UniformKnots::new(0.0, h, m).unwrap()
    }

    #[test]
    fn knot_validation() {
        assert!(UniformKnots::new(0.0, 0.0, 10).is_err());
        assert!(UniformKnots::new(0.0, 0.1, 3).is_err());
        let k = UniformKnots::spanning(0.0, 1.0, 0.1).unwrap();
        assert_eq!(k.m(), 11);
        assert!((k.hi() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_fallback_center_value() {
        let basis = HyperbolicBasis::build(0.0, knots(1.0, 8)).unwrap();
        assert!(basis.is_degenerate());
        let j = 4;
        assert!((basis.eval(j, basis.center(j), 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((basis.eval(j, basis.center(j) + 1.0, 0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn vanishes_outside_support() {
        for alpha in [0.0, 0.7, -2.0, 5.0] {
            let basis = HyperbolicBasis::build(alpha, knots(0.1, 11)).unwrap();
            let j = 5;
            let c = basis.center(j);
            for t in [c - 0.2, c + 0.2, c - 0.35, c + 1.0] {
                assert_eq!(basis.eval(j, t, 0), 0.0);
                assert_eq!(basis.eval(j, t, 2), 0.0);
            }
        }
    }

    #[test]
    fn symmetric_with_flat_top() {
        let basis = HyperbolicBasis::build(1.3, knots(0.1, 11)).unwrap();
        let j = 6;
        let c = basis.center(j);
        assert!(basis.eval(j, c, 1).abs() < 1e-10);
        for u in [0.013, 0.07, 0.11, 0.19] {
            let l = basis.eval(j, c - u, 0);
            let r = basis.eval(j, c + u, 0);
            assert!((l - r).abs() < 1e-12, "u={u}: {l} vs {r}");
            assert!(l > 0.0);
        }
        assert_eq!(basis.eval(j, basis.support_start(j), 0).abs(), 0.0);
    }

    #[test]
    fn depends_on_magnitude_of_alpha_only() {
        let p = HyperbolicBasis::build(2.5, knots(0.2, 6)).unwrap();
        let n = HyperbolicBasis::build(-2.5, knots(0.2, 6)).unwrap();
        assert_eq!(p.segments(), n.segments());
    }

    #[test]
    fn rejects_huge_alpha_h() {
        let err = HyperbolicBasis::build(400.0, knots(0.1, 6)).unwrap_err();
        assert!(matches!(err, Error::SingularBasis { .. }));
        assert!(HyperbolicBasis::build(f64::NAN, knots(0.1, 6)).is_err());
        // Largest accepted value still builds.
        assert!(HyperbolicBasis::build(290.0, knots(0.1, 6)).is_ok());
    }

    #[test]
    fn exponential_coefficients_agree_with_scaled_form() {
        for (alpha, h) in [(1.7_f64, 0.25_f64), (-1.7, 0.25), (9.0, 0.5), (-9.0, 0.5)] {
        let basis = HyperbolicBasis::build(alpha, knots(h, 6)).unwrap();
        let exp = basis.exponential_coefficients().unwrap();
        for seg in 0..4 {
            for v in [0.0, 0.3, 0.8, 1.0] {
                let u = v * h;
                let (ep, em) = ((alpha * u).exp(), (-alpha * u).exp());
                let raw = exp[seg][0] * ep + exp[seg][1] * u * ep + exp[seg][2] * em + exp[seg][3] * u * em;
                let scaled = basis.eval_segment(seg, v, 0);
                assert!((raw - scaled).abs() < 1e-10, "seg {seg} v {v}: {raw} vs {scaled}");
            }
        }
        }
        assert!(HyperbolicBasis::build(0.0, knots(0.25, 6))
            .unwrap()
            .exponential_coefficients()
            .is_none());
    }

    #[test]
    fn design_rows_at_knots_match_cubic_values() {
        let basis = HyperbolicBasis::build(0.0, knots(1.0, 6)).unwrap();
        let b = basis.design_matrix(&[3.0]).unwrap();
        let nz: Vec<f64> = b.row(0).iter().copied().filter(|v| *v != 0.0).collect();
        assert_eq!(nz.len(), 3);
        for (got, want) in nz.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn design_matrix_rejects_outside_points() {
        let basis = HyperbolicBasis::build(1.0, knots(0.1, 11)).unwrap();
        assert!(matches!(
            basis.design_matrix(&[1.2]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn local_basis_series_branch_is_continuous() {
        // hyp_q switches from series to closed form at |x| = 0.1.
        let below = hyp_q(0.1 - 1e-12);
        let above = hyp_q(0.1 + 1e-12);
        assert!((below - above).abs() < 1e-13);
        assert!((shc(1e-4 - 1e-15) - shc(1e-4 + 1e-15)).abs() < 1e-15);
    }
}

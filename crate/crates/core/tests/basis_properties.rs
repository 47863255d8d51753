mod common;

use hpsplinet::hbasis::{HyperbolicBasis, UniformKnots, ALPHA_SWITCH};

const ALPHAS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 5.0];
const STEPS: [f64; 3] = [0.05, 0.1, 0.5];

fn basis(alpha: f64, h: f64) -> HyperbolicBasis {
    HyperbolicBasis::build(alpha, UniformKnots::new(0.0, h, 12).unwrap()).unwrap()
}

fn segment_sup(b: &HyperbolicBasis, order: usize) -> f64 {
    let mut sup: f64 = 0.0;
    for seg in 0..4 {
        for i in 0..=100 {
            sup = sup.max(b.eval_segment(seg, i as f64 / 100.0, order).abs());
        }
    }
    sup
}

#[test]
fn c2_continuity_at_every_knot() {
    for alpha in ALPHAS {
        for h in STEPS {
            let b = basis(alpha, h);
            for order in 0..3 {
                let sup = segment_sup(&b, order);
                for seg in 0..3 {
                    let left = b.eval_segment(seg, 1.0, order);
                    let right = b.eval_segment(seg + 1, 0.0, order);
                    assert!(
                        (left - right).abs() < 1e-8 * sup,
                        "alpha {alpha} h {h} order {order} knot {seg}: {left} vs {right}"
                    );
                }
                // support endpoints
                assert!(b.eval_segment(0, 0.0, order).abs() < 1e-8 * sup);
                assert!(b.eval_segment(3, 1.0, order).abs() < 1e-8 * sup);
            }
        }
    }
}

#[test]
fn symmetric_and_positive_inside_support() {
    for alpha in ALPHAS {
        for h in STEPS {
            let b = basis(alpha, h);
            let j = 6;
            let c = b.center(j);
            let peak = b.eval(j, c, 0);
            for i in 1..200 {
                let u = 2.0 * h * i as f64 / 200.0;
                let l = b.eval(j, c - u, 0);
                let r = b.eval(j, c + u, 0);
                assert!((l - r).abs() < 1e-10 * peak, "alpha {alpha} h {h} u {u}");
                assert!(l > 0.0 && r > 0.0);
            }
            assert!(b.eval(j, c, 1).abs() < 1e-9 * segment_sup(&b, 1));
        }
    }
}

#[test]
fn compact_support_is_exact() {
    for alpha in ALPHAS {
        for h in STEPS {
            let b = basis(alpha, h);
            for j in 0..b.len() {
                let c = b.center(j);
                for k in 0..50 {
                    let off = 2.0 * h + k as f64 * h / 7.0;
                    for t in [c + off, c - off] {
                        if (t - c).abs() < 2.0 * h {
                            continue; // rounding put t back inside
                        }
                        for order in 0..3 {
                            assert_eq!(b.eval(j, t, order), 0.0);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn annihilated_by_the_fourth_order_operator() {
    for alpha in ALPHAS {
        for h in STEPS {
            let b = basis(alpha, h);
            let a2 = (alpha * h).powi(2);
            let scale = segment_sup(&b, 4)
                .max(2.0 * a2 * segment_sup(&b, 2))
                .max(a2 * a2 * segment_sup(&b, 0));
            for seg in 0..4 {
                for i in 1..20 {
                    let v = i as f64 / 20.0;
                    let r = b.eval_segment(seg, v, 4) - 2.0 * a2 * b.eval_segment(seg, v, 2)
                        + a2 * a2 * b.eval_segment(seg, v, 0);
                    assert!(r.abs() < 1e-8 * scale, "alpha {alpha} h {h}: residual {r}");
                }
            }
        }
    }
}

#[test]
fn translation_invariance() {
    let b = basis(1.3, 0.1);
    let h = 0.1;
    for j in 2..10 {
        for i in 0..40 {
            let t = b.support_start(j) + 4.0 * h * i as f64 / 40.0;
            let here = b.eval(j, t, 0);
            let shifted = b.eval(j + 1, t + h, 0);
            assert!((here - shifted).abs() < 1e-12, "j {j} t {t}");
        }
    }
}

#[test]
fn cubic_fallback_agrees_across_the_switch() {
    for h in STEPS {
        let below = basis(0.99 * ALPHA_SWITCH / h, h);
        let above = basis(1.01 * ALPHA_SWITCH / h, h);
        assert!(below.is_degenerate());
        assert!(!above.is_degenerate());
        for order in 0..3 {
            for seg in 0..4 {
                for i in 0..=50 {
                    let v = i as f64 / 50.0;
                    let d = below.eval_segment(seg, v, order) - above.eval_segment(seg, v, order);
                    assert!(d.abs() < 1e-6, "h {h} order {order}: {d}");
                }
            }
        }
    }
}

/// Dense least-squares oracle (normal equations) for e^{±αt} on a fine grid.
fn reproduction_residual(alpha: f64, h: f64, sign: f64) -> f64 {
    let knots = UniformKnots::spanning(0.0, 1.0, h).unwrap();
    let b = HyperbolicBasis::build(alpha, knots).unwrap();
    let t = common::grid(0.0, knots.hi(), 200);
    let design = common::to_rows(&b.design_matrix(&t).unwrap());
    // scale the target to O(1) so the tolerance is relative to its size
    let peak = (sign * alpha * knots.hi()).exp().max(1.0);
    let y: Vec<f64> = t.iter().map(|&ti| (sign * alpha * ti).exp() / peak).collect();
    let coeffs = common::normal_equations(&design, &y, &[]);
    design
        .iter()
        .zip(&y)
        .map(|(row, yi)| (row.iter().zip(&coeffs).map(|(a, c)| a * c).sum::<f64>() - yi).abs())
        .fold(0.0, f64::max)
}

#[test]
fn reproduces_exponentials() {
    // alpha = 1, h = 0.1, m = 11 on [0, 1]
    assert!(reproduction_residual(1.0, 0.1, 1.0) < 1e-8);
    for alpha in ALPHAS {
        for h in STEPS {
            for sign in [1.0, -1.0] {
                let r = reproduction_residual(alpha, h, sign);
                assert!(r < 1e-8, "alpha {alpha} h {h} sign {sign}: residual {r}");
            }
        }
    }
}

#[test]
fn design_rows_have_positive_sums_and_few_nonzeros() {
    let knots = UniformKnots::spanning(0.0, 1.0, 0.1).unwrap();
    let b = HyperbolicBasis::build(1.0, knots).unwrap();
    let t = common::grid(0.0, 1.0, 157);
    let m = b.design_matrix(&t).unwrap();
    for i in 0..m.nrows() {
        let row = m.row(i);
        assert!(row.sum() > 0.0);
        assert!(row.iter().filter(|v| **v != 0.0).count() <= 4);
    }
    // a knot row has at most three nonzeros
    let at_knot = b.design_matrix(&[0.5]).unwrap();
    assert!(at_knot.row(0).iter().filter(|v| **v != 0.0).count() <= 3);
}

// Hyperbolic B-spline basis: prototype samples and exponential reproduction.

use std::error::Error;

use hpsplinet::hbasis::{least_squares_reproduction, HyperbolicBasis, UniformKnots};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let knots = UniformKnots::spanning(0.0, 1.0, 0.1)?;
    let basis = HyperbolicBasis::build(2.0, knots)?;
    println!("{} basis functions, condition estimate {:.2e}", basis.len(), basis.condition());

    for [t, b, b1, b2] in basis.sample_prototype(9) {
        println!("t = {t:.3}  B = {b:.6}  B' = {b1:+.4}  B'' = {b2:+.3}");
    }

    let t: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
    for sign in [1.0, -1.0] {
        let (_, residual) = least_squares_reproduction(&basis, &t, |x| (sign * 2.0 * x).exp())?;
        println!("e^({sign:+}·2t) reproduced with max residual {residual:.2e}");
    }

    // below the switch the cubic B-spline is used
    let cubic = HyperbolicBasis::build(1e-6, knots)?;
    println!("alpha = 1e-6 uses the cubic fallback: {}", cubic.is_degenerate());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

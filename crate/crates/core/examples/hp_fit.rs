// Penalized fit of noisy exponential data across λ.

use std::error::Error;

use hpsplinet::hbasis::UniformKnots;
use hpsplinet::hpfit::{fit, reconstruction_metrics};
use hpsplinet::seeds;
use rand_distr::{Distribution, Normal};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let t: Vec<f64> = (0..32).map(|i| i as f64 / 31.0).collect();
    let clean: Vec<f64> = t.iter().map(|v| 1.5 * (-1.2 * v).exp()).collect();
    let noise = Normal::new(0.0, 0.02)?;
    let mut rng = seeds::rng(1);
    let y: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
    let knots = UniformKnots::spanning(0.0, 1.0, 0.1)?;

    println!("{:>8} {:>12} {:>12} {:>12}", "lambda", "sse", "penalty", "mse vs clean");
    for lambda in [0.0, 0.01, 0.1, 1.0, 10.0, 1000.0] {
        let s = fit(&t, &y, 1.2, lambda, knots)?;
        let m = reconstruction_metrics(&clean, &s.evaluate(&t)?)?;
        println!("{lambda:>8} {:>12.4e} {:>12.4e} {:>12.4e}", s.sse(), s.penalty_value(), m.mse);
    }

    // exact exponential data is untouched by the penalty
    let s = fit(&t, &clean, 1.2, 1000.0, knots)?;
    let m = reconstruction_metrics(&clean, &s.evaluate(&t)?)?;
    println!("noise-free data at lambda = 1000: max error {:.2e}", m.max_abs);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

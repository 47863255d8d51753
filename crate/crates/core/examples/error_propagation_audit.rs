// Error-propagation and composite Lipschitz audits of a predictor.

use std::error::Error;

use hpsplinet::datasets::{self, AlphaFunction, SWEEP_DIM};
use hpsplinet::net::{MlpNetwork, MlpSpec};
use hpsplinet::stability::{audit_prop1, bound_audit, SplineConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let t = datasets::time_grid(SWEEP_DIM, true);
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let spline = SplineConfig::default();

    // a predictor with a fixed 1% bias
    let biased = |s: &[f64]| -(s[1].ln()) * (SWEEP_DIM - 1) as f64 * 1.01;
    for f in AlphaFunction::ALL {
        let r = audit_prop1(f, &biased, &spline, &t, &grid)?;
        println!(
            "{f}: eps_hat {:.3e}, L_eff {:.3e}, L_flat {:.3e}, propagation {:.3e}, singular deltas {:?}, holds {}",
            r.eps_hat, r.l_eff, r.l_flat, r.propagation, r.deltas, r.holds
        );
    }

    let net = MlpNetwork::init(&MlpSpec::new(SWEEP_DIM, 3, 4)?, 2);
    let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
    let signals: Vec<Vec<f64>> = datasets::make_sweep_dataset(AlphaFunction::A1, &xs, &t, 0)?
        .into_iter()
        .map(|s| s.samples)
        .collect();
    let a = bound_audit(&net, &signals, &t, &spline)?;
    println!(
        "composite: observed {:.3e} <= L_s + L_hp L_F = {:.3e} + {:.3e}·{:.3e}: {}",
        a.observed_composite, a.l_s_emp, a.l_hp_emp, a.l_f_emp, a.holds
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

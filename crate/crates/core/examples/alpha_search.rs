// Grid search for the frequency that minimizes the fit residual.

use std::error::Error;

use hpsplinet::datasets::{self, ScenarioKind};
use hpsplinet::oracle::{optimal_alpha, AlphaSearchConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let t = datasets::time_grid(32, true);
    let y: Vec<f64> = t.iter().map(|v| (-2.0 * v).exp()).collect();
    let r = optimal_alpha(&t, &y, &AlphaSearchConfig::default())?;
    println!("e^(-2t): grid alpha {:.4}, refined alpha {:.6} (sse {:.2e})", r.grid_alpha, r.alpha, r.sse);

    let growing = datasets::make_scenario_signal(ScenarioKind::S1, 1.0, 3.0, &t);
    let cfg = AlphaSearchConfig {
        negate: true,
        ..AlphaSearchConfig::default()
    };
    let r = optimal_alpha(&t, &growing.samples, &cfg)?;
    println!("e^(3t) with the negated search: alpha {:.6}", r.alpha);

    let mixed = datasets::make_scenario_signal(ScenarioKind::S3, 1.0, 1.5, &t);
    let r = optimal_alpha(&t, &mixed.samples, &AlphaSearchConfig::default())?;
    println!("(t/2)e^(-3) + e^(-0.75t): best alpha {:.4}, sse {:.2e}", r.alpha, r.sse);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

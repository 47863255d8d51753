// Predicted versus grid-searched α on the three signal scenarios.

use std::error::Error;

use hpsplinet::harness::{plot_scenario, run_scenario, ScenarioConfig};
use hpsplinet::net::TrainConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = ScenarioConfig {
        n_train: 80,
        n_enrich: 40,
        n_test: 10,
        train: TrainConfig {
            max_epochs: 200,
            ..TrainConfig::default()
        },
        ..ScenarioConfig::default()
    };
    let dir = std::env::temp_dir().join("hpsplinet_example_scenarios");
    for id in 1..=3 {
        let r = run_scenario(id, &cfg)?;
        println!(
            "scenario {id}: mean RE predicted {:.3e}, grid-search {:.3e}; mean MSE predicted {:.3e}, grid-search {:.3e}",
            r.mean_re_pred, r.mean_re_oracle, r.mean_mse_pred, r.mean_mse_oracle
        );
        for i in r.instances.iter().take(3) {
            println!("  {:?} alpha {:.3}: predicted {:.3}, grid-search {:.3}", i.family, i.alpha_true, i.alpha_pred, i.alpha_oracle);
        }
        plot_scenario(&r, &dir)?;
    }
    println!("plots in {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

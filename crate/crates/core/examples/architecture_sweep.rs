// Smallest width meeting a sup-norm target, per depth.

use std::error::Error;

use hpsplinet::datasets::AlphaFunction;
use hpsplinet::harness::{run_table1, Table1Config};
use hpsplinet::net::TrainConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = Table1Config {
        n_train: 300,
        n_val: 100,
        n_test: 50,
        width_cap: 3,
        train: TrainConfig {
            max_epochs: 400,
            ..Table1Config::default().train
        },
        ..Table1Config::default()
    };
    println!("{:>4} {:>5} {:>2} {:>2} {:>6} {:>10} {:>10} {:>10}", "f", "eps", "L", "W", "C_tot", "max_alpha", "mse_pred", "mse_prop");
    for f in [AlphaFunction::A1, AlphaFunction::A3] {
        for r in run_table1(f, &[0.1], &[3, 4], &cfg)? {
            println!(
                "{:>4} {:>5} {:>2} {:>2} {:>6} {:>10.3e} {:>10.3e} {:>10.3e}{}",
                r.alpha_fn.to_string(),
                r.eps,
                r.depth,
                r.width,
                r.c_tot,
                r.max_alpha_err,
                r.mse_rec_pred,
                r.mse_propagation,
                if r.unmet { "  (unmet)" } else { "" }
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

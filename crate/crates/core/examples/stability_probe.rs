// Replace one training sample and compare the two trained models.

use std::error::Error;

use hpsplinet::datasets::{self, MULTISCALE_LEN};
use hpsplinet::net::{MlpNetwork, MlpSpec};
use hpsplinet::stability::{stability_probe, GenGapConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let t = datasets::time_grid(MULTISCALE_LEN, true);
    let pool = datasets::multiscale_dataset(33, 1.0, &t, 5)?;
    let (x, y): (Vec<_>, Vec<_>) = pool.iter().map(|s| (s.samples.clone(), s.alpha_target)).unzip();
    let (train_x, train_y) = (&x[..32], &y[..32]);
    let cfg = GenGapConfig::default();
    let init = MlpNetwork::init(&MlpSpec::new(MULTISCALE_LEN, cfg.depth, 16)?, 1);
    let train = hpsplinet::net::TrainConfig {
        max_epochs: 100,
        ..cfg.train
    };

    let same = stability_probe(train_x, train_y, 0, (&x[0], y[0]), (&x, &y), &init, &train)?;
    println!("self-replacement: beta = {}", same.beta_hat);

    let r = stability_probe(train_x, train_y, 0, (&x[32], y[32]), (&x, &y), &init, &train)?;
    println!(
        "replace sample 0 by a fresh draw: beta = {:.3e}, L_loss = {:.3e}, L_F = {:.3e}, D = {:.3}, bound {:.3e}",
        r.beta_hat, r.l_loss, r.l_f, r.diameter, r.bound
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

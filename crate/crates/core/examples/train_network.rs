// Train a small ReLU network to map e^{-α(x)t} samples back to α(x).

use std::error::Error;

use hpsplinet::datasets::{self, AlphaFunction, XSampling, SWEEP_DIM};
use hpsplinet::net::{self, complexity, MlpNetwork, MlpSpec, TrainConfig, Validation};

type Split = (Vec<Vec<f64>>, Vec<f64>);

fn split(f: AlphaFunction, xs: &[f64]) -> Result<Split, Box<dyn Error>> {
    let t = datasets::time_grid(SWEEP_DIM, true);
    Ok(datasets::make_sweep_dataset(f, xs, &t, 0)?
        .into_iter()
        .map(|s| (s.samples, s.alpha_target))
        .unzip())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let f = AlphaFunction::A2;
    let (x, y) = split(f, &datasets::sweep_abscissae(400, XSampling::Grid, 0))?;
    let (vx, vy) = split(f, &datasets::validation_abscissae(100))?;
    let spec = MlpSpec::new(SWEEP_DIM, 3, 3)?;
    println!("L = {}, W = {}, C_tot = {}", spec.depth, spec.width, complexity(&spec));

    let cfg = TrainConfig {
        max_epochs: 300,
        target_eps: Some(0.1),
        eval_every: 10,
        seed: 7,
        ..TrainConfig::default()
    };
    let val = Validation {
        inputs: &vx,
        targets: &vy,
    };
    let out = net::train(&MlpNetwork::init(&spec, 7), &x, &y, Some(val), &cfg)?;
    for r in out.history.iter().step_by(5) {
        println!("epoch {:>4}: train mse {:.3e}, val max {:.3e}", r.epoch, r.train_mse, r.val_max.unwrap_or(f64::NAN));
    }
    println!("best sup-norm error {:.3e} at epoch {} (target met: {})", out.best_score(), out.best_epoch, out.converged);
    println!(
        "Lipschitz: empirical {:.3e} <= upper {:.3e}",
        out.net.lipschitz_empirical(&vx)?,
        out.net.lipschitz_upper()
    );

    let path = std::env::temp_dir().join("hpsplinet_example_model.json");
    out.net.save_json(&path)?;
    let back = MlpNetwork::load_json(&path)?;
    println!("reloaded model predicts {:.6} for x = 0.25 (true {:.6})", back.forward(&x[100])?, y[100]);
    std::fs::remove_file(path)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Seeded signal generators and their CSV round trip.

use std::error::Error;

use hpsplinet::datasets::{self, AlphaFunction, ScenarioKind, XSampling};
use hpsplinet::harness::io;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for f in AlphaFunction::ALL {
        let v: Vec<String> = [0.0, 0.37, 0.65, 1.0].iter().map(|&x| Ok(format!("{:.4}", f.eval(x)?))).collect::<hpsplinet::Result<_>>()?;
        println!("{f}: alpha(0, 0.37, 0.65, 1) = {}; singular set {:?}", v.join(", "), f.singular_set());
    }

    let t = datasets::time_grid(32, true);
    let xs = datasets::sweep_abscissae(5, XSampling::Random, 42);
    let sweep = datasets::make_sweep_dataset(AlphaFunction::A4, &xs, &t, 42)?;
    let (noisy, touched) = datasets::add_noise(&sweep, 0.4, 1e-2, 43)?;
    println!("noise added to signals {touched:?}");

    let path = std::env::temp_dir().join("hpsplinet_example_signals.csv");
    io::write_signals(&path, &noisy)?;
    let back = io::read_signals(&path)?;
    println!("{} signals of length {} read back, first target {:.4}", back.len(), back[0].len(), back[0].alpha_target);
    std::fs::remove_file(path)?;

    for kind in [ScenarioKind::S1, ScenarioKind::S2, ScenarioKind::S3] {
        let s = datasets::make_scenario_signal(kind, 1.0, 2.0, &t);
        println!("{kind}: s(0) = {:.4}, s(1) = {:.4}", s.samples[0], s.samples[31]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

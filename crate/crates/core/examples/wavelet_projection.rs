// Wavelet projection of multiscale signals and the shrinking diameters D_J.

use std::error::Error;

use hpsplinet::datasets::{self, MULTISCALE_LEN};
use hpsplinet::wavelets::{diameter, diameter_projected, WaveletFamily, WaveletProjector};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let haar = WaveletProjector::new(WaveletFamily::Haar, 2, 4)?;
    println!("Haar J=2 of (4,0,0,0): {:?}", haar.project(&[4.0, 0.0, 0.0, 0.0])?);

    let t = datasets::time_grid(MULTISCALE_LEN, true);
    let signals: Vec<Vec<f64>> = datasets::multiscale_dataset(64, 5.5, &t, 3)?
        .into_iter()
        .map(|s| s.samples)
        .collect();
    let d = diameter(&signals)?;
    println!("D = {d:.4}");
    for family in [WaveletFamily::Haar, WaveletFamily::D4] {
        let dj: Vec<String> = (1..=5)
            .map(|level| {
                let p = WaveletProjector::new(family, level, MULTISCALE_LEN)?;
                Ok(format!("{:.4}", diameter_projected(&signals, &p)?))
            })
            .collect::<hpsplinet::Result<_>>()?;
        println!("{family:?}: D_1..D_5 = {}", dj.join(", "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

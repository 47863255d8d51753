// A reduced generalization-gap sweep with calibrated D/√n bounds.

use std::error::Error;

use hpsplinet::harness::{gap_trends, gengap_sweep, io, plot_gengap};
use hpsplinet::net::TrainConfig;
use hpsplinet::stability::GenGapConfig;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cfg = GenGapConfig {
        pool_size: 128,
        width: 8,
        train: TrainConfig {
            max_epochs: 40,
            ..GenGapConfig::default().train
        },
        ..GenGapConfig::default()
    };
    let records = gengap_sweep(&[16, 32, 64, 128], &[1.0], &[0, 2], 2, 0, &cfg)?;
    for r in &records {
        println!(
            "n={:>3} J={} seed={:>20}: gap {:.3e}, D {:.3}, bound {:.3e}",
            r.n, r.level, r.seed, r.gengap, r.diameter, r.bound
        );
    }
    for t in gap_trends(&records) {
        println!("A={} J={}: spearman {:+.2}, c = {:.3}, consistent {}", t.amplitude, t.level, t.spearman, t.c, t.bound_consistent);
    }
    let dir = std::env::temp_dir().join("hpsplinet_example_gengap");
    io::write_records(&dir.join("gengap.csv"), &records)?;
    plot_gengap(&records, &dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

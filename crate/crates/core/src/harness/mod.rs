//! Experiment drivers, persistence and plots.

pub mod config;
pub mod io;
pub mod plot;
pub mod scenarios;
pub mod table1;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::seeds::derive_seed;
use crate::stability::{gengap_experiment, spearman, GenGapConfig, GenGapRecord};

use plot::{emit_plot, mean_line, LineStyle, PlotSpec, Series};
use scenarios::ScenarioReport;

pub use scenarios::{run_scenario, ScenarioConfig};
pub use table1::{run_table1, SweepRow, Table1Config};

/// Runs every `(n, A, J, seed)` cell. Cell seeds are derived from `base_seed`
/// and the seed index; the output order is fixed.
pub fn gengap_sweep(
    sizes: &[usize],
    amplitudes: &[f64],
    levels: &[usize],
    seeds: usize,
    base_seed: u64,
    cfg: &GenGapConfig,
) -> Result<Vec<GenGapRecord>> {
    let mut cells = Vec::new();
    for &a in amplitudes {
        for &j in levels {
            for s in 0..seeds as u64 {
                for &n in sizes {
                    cells.push((n, a, j, derive_seed(base_seed, &[s])));
                }
            }
        }
    }
    cells
        .par_iter()
        .map(|&(n, a, j, seed)| gengap_experiment(n, a, j, seed, cfg))
        .collect()
}

/// Seed-averaged GenGap curve for one `(A, J)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTrend {
    pub amplitude: f64,
    pub level: usize,
    pub sizes: Vec<usize>,
    pub mean_gap: Vec<f64>,
    pub mean_bound: Vec<f64>,
    pub spearman: f64,
    /// `mean_gap / mean_bound` at the smallest n.
    pub c: f64,
    /// `mean_gap ≤ c · mean_bound` at every n.
    pub bound_consistent: bool,
}

pub fn gap_trends(records: &[GenGapRecord]) -> Vec<GapTrend> {
    let mut groups: BTreeMap<(u64, usize), BTreeMap<usize, (f64, f64, usize)>> = BTreeMap::new();
    for r in records {
        let cell = groups
            .entry((r.amplitude.to_bits(), r.level))
            .or_default()
            .entry(r.n)
            .or_insert((0.0, 0.0, 0));
        cell.0 += r.gengap;
        cell.1 += r.bound;
        cell.2 += 1;
    }
    groups
        .into_iter()
        .map(|((a, level), by_n)| {
            let sizes: Vec<usize> = by_n.keys().copied().collect();
            let mean_gap: Vec<f64> = by_n.values().map(|c| c.0 / c.2 as f64).collect();
            let mean_bound: Vec<f64> = by_n.values().map(|c| c.1 / c.2 as f64).collect();
            let ns: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
            let c = mean_gap[0] / mean_bound[0];
            let bound_consistent = mean_gap
                .iter()
                .zip(&mean_bound)
                .all(|(g, b)| *g <= c * b * (1.0 + 1e-12));
            GapTrend {
                amplitude: f64::from_bits(a),
                level,
                spearman: spearman(&ns, &mean_gap),
                sizes,
                mean_gap,
                mean_bound,
                c,
                bound_consistent,
            }
        })
        .collect()
}

fn amp_tag(a: f64) -> String {
    format!("{a}").replace('.', "p")
}

/// One SVG per amplitude: mean GenGap and calibrated bound against n.
pub fn plot_gengap(records: &[GenGapRecord], dir: &Path) -> Result<()> {
    let trends = gap_trends(records);
    let mut by_amp: BTreeMap<u64, Vec<&GapTrend>> = BTreeMap::new();
    for t in &trends {
        by_amp.entry(t.amplitude.to_bits()).or_default().push(t);
    }
    for (a, ts) in by_amp {
        let a = f64::from_bits(a);
        let mut series = Vec::new();
        for t in ts {
            let pts = |v: &[f64]| t.sizes.iter().zip(v).map(|(&n, &g)| (n as f64, g)).collect();
            series.push(Series::new(format!("GenGap J={}", t.level), pts(&t.mean_gap)));
            let scaled: Vec<f64> = t.mean_bound.iter().map(|b| t.c * b).collect();
            series.push(
                Series::new(format!("c·D/√n J={}", t.level), pts(&scaled))
                    .style(LineStyle::Dashed)
                    .markers(false),
            );
        }
        let spec = PlotSpec {
            title: format!("Generalization gap, A = {a}"),
            x_label: "n".into(),
            y_label: "GenGap".into(),
            log_x: true,
            log_y: true,
        };
        emit_plot(&series, &spec, &dir.join(format!("gengap_A{}.svg", amp_tag(a))))?;
    }
    Ok(())
}

/// MSE and RE per test instance for both methods, with mean lines.
pub fn plot_scenario(report: &ScenarioReport, dir: &Path) -> Result<()> {
    let n = report.instances.len() as f64;
    for metric in ["MSE", "RE"] {
        let (pred, orc): (Vec<f64>, Vec<f64>) = report
            .instances
            .iter()
            .map(|i| if metric == "MSE" { (i.mse_pred, i.mse_oracle) } else { (i.re_pred, i.re_oracle) })
            .unzip();
        let pts = |v: &[f64]| v.iter().enumerate().map(|(i, &y)| (i as f64 + 1.0, y)).collect();
        let series = vec![
            Series::new("predicted α", pts(&pred)),
            Series::new("grid-search α*", pts(&orc)).style(LineStyle::Dashed),
            mean_line("mean predicted", &pred, 1.0, n),
            mean_line("mean grid-search", &orc, 1.0, n),
        ];
        let spec = PlotSpec {
            title: format!("Scenario {} ({metric})", report.scenario),
            x_label: "test instance".into(),
            y_label: metric.into(),
            log_x: false,
            log_y: true,
        };
        let name = format!("scenario{}_s{}_{}.svg", report.scenario, report.seed, metric.to_lowercase());
        emit_plot(&series, &spec, &dir.join(name))?;
    }
    Ok(())
}

/// Table 1 analogue: sup-norm α error of the selected row per (ε, L).
pub fn plot_table1(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut by_eps: BTreeMap<u64, Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        by_eps.entry(r.eps.to_bits()).or_default().push(r);
    }
    let series: Vec<Series> = by_eps
        .into_iter()
        .map(|(e, rs)| {
            Series::new(
                format!("ε = {}", f64::from_bits(e)),
                rs.iter().map(|r| (r.c_tot as f64, r.max_alpha_err)).collect(),
            )
        })
        .collect();
    let spec = PlotSpec {
        title: "Max α error against complexity".into(),
        x_label: "C_tot".into(),
        y_label: "max |F - α|".into(),
        log_x: false,
        log_y: true,
    };
    emit_plot(&series, &spec, path)
}

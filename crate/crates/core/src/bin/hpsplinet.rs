use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hpsplinet::datasets::{self, AlphaFunction, LabeledSignal, ScenarioKind, XSampling};
use hpsplinet::harness::{self, config, io, scenarios, table1, ScenarioConfig, Table1Config};
use hpsplinet::hbasis::{HyperbolicBasis, UniformKnots};
use hpsplinet::hpfit;
use hpsplinet::net::{self, MlpNetwork, MlpSpec, TrainConfig, Validation};
use hpsplinet::oracle::{self, AlphaSearchConfig};
use hpsplinet::seeds::{self, derive_seed};
use hpsplinet::stability::{self, GenGapConfig, SplineConfig};
use hpsplinet::wavelets::{WaveletFamily, WaveletProjector};
use hpsplinet::{Error, Result};

#[derive(Parser)]
#[command(name = "hpsplinet", version, about = "HP-spline frequency estimation with ReLU networks")]
struct Cli {
    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML file with flag values; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the basis prototype and its derivatives.
    Basis(BasisArgs),
    /// Fit an HP-spline to t,y data.
    Fit(FitArgs),
    /// Generate signal datasets.
    Gen(GenArgs),
    /// Train a network on an alpha-function sweep.
    Train(TrainArgs),
    /// Predict alpha for signals with a trained model.
    Predict(PredictArgs),
    /// Grid-search the best alpha for t,y data.
    Oracle(OracleArgs),
    /// Width sweep per (eps, depth).
    Table1(Table1Args),
    /// Predicted versus grid-search alpha on the three scenarios.
    Scenarios(ScenarioArgs),
    /// Generalization-gap sweep.
    Gengap(GenGapArgs),
    /// Wavelet projection of signals.
    Wavelet(WaveletArgs),
    /// Error-propagation and Lipschitz audits of a trained model.
    Audit(AuditArgs),
}

#[derive(Args)]
struct BasisArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    knot_step: f64,
    #[arg(long, default_value_t = 11)]
    m: usize,
    #[arg(long, default_value_t = 201)]
    samples: usize,
    #[arg(long, default_value = "basis.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    knot_step: f64,
    #[arg(long, default_value = "fit.csv")]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum GenKind {
    Sweep,
    Multiscale,
    Scenario,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long, default_value = "a1")]
    alpha_fn: AlphaFunction,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Samples per signal (default 32, multiscale 256).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value = "grid")]
    sampling: String,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value = "s1")]
    signal: ScenarioKind,
    #[arg(long, default_value_t = 0.5)]
    alpha_min: f64,
    #[arg(long, default_value_t = 5.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    noise_fraction: f64,
    #[arg(long, default_value = "signals.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value = "a1")]
    alpha_fn: AlphaFunction,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 3)]
    width: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 20_000)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 1000)]
    n_train: usize,
    #[arg(long, default_value_t = 200)]
    n_val: usize,
    #[arg(long, default_value = "model.json")]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "predictions.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    knot_step: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha_min: f64,
    #[arg(long, default_value_t = 10.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 200)]
    grid_size: usize,
    #[arg(long)]
    no_refine: bool,
    /// Search growing exponentials (fit with -alpha).
    #[arg(long)]
    negate: bool,
    #[arg(long, default_value = "alpha.json")]
    out: PathBuf,
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, value_delimiter = ',', default_value = "a1,a2,a3,a4")]
    alpha_fn: Vec<AlphaFunction>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.07,0.008")]
    eps_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5")]
    depths: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    width_cap: usize,
    #[arg(long, default_value_t = 20_000)]
    epochs: usize,
    #[arg(long, default_value_t = 1000)]
    n_train: usize,
    #[arg(long, default_value = "table1.csv")]
    out: PathBuf,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    scenario: Vec<u8>,
    /// Number of seeds, derived from --seed.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[arg(long, default_value_t = 250)]
    n_train: usize,
    #[arg(long, default_value_t = 250)]
    n_enrich: usize,
    #[arg(long, default_value_t = 50)]
    n_test: usize,
    #[arg(long, default_value_t = 2000)]
    epochs: usize,
    #[arg(long, default_value = "scenarios.csv")]
    out: PathBuf,
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Args)]
struct GenGapArgs {
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512")]
    n_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4.5,5,6,8,10.5")]
    amplitudes: Vec<f64>,
    /// Projection levels; 0 means no projection.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    levels: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    #[arg(long, default_value_t = 400)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    width: usize,
    #[arg(long, default_value = "haar")]
    family: WaveletFamily,
    #[arg(long, default_value = "gengap.csv")]
    out: PathBuf,
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Args)]
struct WaveletArgs {
    #[arg(long, default_value = "haar")]
    family: WaveletFamily,
    #[arg(long)]
    level: usize,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "projected.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long, default_value = "a1")]
    alpha_fn: AlphaFunction,
    /// Trained model; trains one with --depth/--width/--eps when absent.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 3)]
    width: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 101)]
    grid_size: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    knot_step: f64,
    #[arg(long, default_value = "audit.json")]
    out: PathBuf,
}

struct Ctx {
    seed: u64,
    out_dir: Option<PathBuf>,
}

impl Ctx {
    fn out(&self, p: &Path) -> PathBuf {
        match &self.out_dir {
            Some(d) if p.is_relative() => d.join(p),
            _ => p.to_path_buf(),
        }
    }
}

#[derive(Serialize)]
struct BasisRow {
    t: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "B'")]
    b1: f64,
    #[serde(rename = "B''")]
    b2: f64,
}

#[derive(Serialize)]
struct FitRow {
    t: f64,
    y: f64,
    yhat: f64,
    residual: f64,
}

#[derive(Serialize)]
struct FitSummary<'a> {
    alpha: f64,
    lambda: f64,
    knot_step: f64,
    coefficients: &'a [f64],
    sse: f64,
    penalty_value: f64,
}

#[derive(Serialize)]
struct Prediction {
    alpha_target: f64,
    alpha_pred: f64,
}

fn basis(ctx: &Ctx, a: BasisArgs) -> Result<()> {
    let knots = UniformKnots::new(0.0, a.knot_step, a.m)?;
    let b = HyperbolicBasis::build(a.alpha, knots)?;
    let rows: Vec<BasisRow> = b
        .sample_prototype(a.samples)
        .into_iter()
        .map(|[t, b, b1, b2]| BasisRow { t, b, b1, b2 })
        .collect();
    let out = ctx.out(&a.out);
    io::write_records(&out, &rows)?;
    println!("wrote {} samples to {}", rows.len(), out.display());
    Ok(())
}

fn fit(ctx: &Ctx, a: FitArgs) -> Result<()> {
    let (t, y) = io::read_xy(&a.data)?;
    let knots = oracle::knots_for(&t, a.knot_step)?;
    let sp = hpfit::fit(&t, &y, a.alpha, a.lambda, knots)?;
    let yhat = sp.evaluate(&t)?;
    let rows: Vec<FitRow> = t
        .iter()
        .zip(&y)
        .zip(&yhat)
        .map(|((&t, &y), &yhat)| FitRow {
            t,
            y,
            yhat,
            residual: y - yhat,
        })
        .collect();
    let out = ctx.out(&a.out);
    io::write_records(&out, &rows)?;
    io::write_json(
        &out.with_extension("json"),
        &FitSummary {
            alpha: sp.alpha(),
            lambda: sp.lambda(),
            knot_step: a.knot_step,
            coefficients: sp.coeffs(),
            sse: sp.sse(),
            penalty_value: sp.penalty_value(),
        },
    )?;
    println!("sse = {:.6e}, penalty = {:.6e}", sp.sse(), sp.penalty_value());
    Ok(())
}

fn sampling(s: &str) -> Result<XSampling> {
    match s {
        "grid" => Ok(XSampling::Grid),
        "random" => Ok(XSampling::Random),
        other => Err(Error::InvalidInput(format!("unknown sampling '{other}'"))),
    }
}

fn gen(ctx: &Ctx, a: GenArgs) -> Result<()> {
    let seed = ctx.seed;
    let signals: Vec<LabeledSignal> = match a.kind {
        GenKind::Sweep => {
            let t = datasets::time_grid(a.dim.unwrap_or(datasets::SWEEP_DIM), true);
            let xs = datasets::sweep_abscissae(a.n, sampling(&a.sampling)?, seed);
            datasets::make_sweep_dataset(a.alpha_fn, &xs, &t, seed)?
        }
        GenKind::Multiscale => {
            let t = datasets::time_grid(a.dim.unwrap_or(datasets::MULTISCALE_LEN), true);
            datasets::multiscale_dataset(a.n, a.amplitude, &t, seed)?
        }
        GenKind::Scenario => {
            if !(a.alpha_min <= a.alpha_max) {
                return Err(Error::InvalidInput("alpha-min must not exceed alpha-max".into()));
            }
            let t = datasets::time_grid(a.dim.unwrap_or(datasets::SWEEP_DIM), true);
            let mut rng = seeds::rng(seed);
            (0..a.n)
                .map(|_| {
                    use rand::Rng;
                    let alpha = rng.random_range(a.alpha_min..=a.alpha_max);
                    datasets::make_scenario_signal(a.signal, a.amplitude, alpha, &t)
                })
                .collect()
        }
    };
    let (signals, _) = datasets::add_noise(&signals, a.noise_fraction, a.noise_sigma, derive_seed(seed, &[7]))?;
    let out = ctx.out(&a.out);
    io::write_signals(&out, &signals)?;
    println!("wrote {} signals to {}", signals.len(), out.display());
    Ok(())
}

fn sweep_split(f: AlphaFunction, xs: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    let t = datasets::time_grid(datasets::SWEEP_DIM, true);
    Ok(datasets::make_sweep_dataset(f, xs, &t, 0)?
        .into_iter()
        .map(|s| (s.samples, s.alpha_target))
        .unzip())
}

fn train_sweep_model(
    f: AlphaFunction,
    depth: usize,
    width: usize,
    cfg: &TrainConfig,
    n_train: usize,
    n_val: usize,
    seed: u64,
) -> Result<net::TrainOutcome> {
    let (tx, ty) = sweep_split(f, &datasets::sweep_abscissae(n_train, XSampling::Grid, 0))?;
    let (vx, vy) = sweep_split(f, &datasets::validation_abscissae(n_val))?;
    let spec = MlpSpec::new(datasets::SWEEP_DIM, depth, width)?;
    let init = MlpNetwork::init(&spec, derive_seed(seed, &[1]));
    let val = Validation {
        inputs: &vx,
        targets: &vy,
    };
    net::train(&init, &tx, &ty, Some(val), cfg)
}

fn train(ctx: &Ctx, a: TrainArgs) -> Result<()> {
    let cfg = TrainConfig {
        learning_rate: a.lr,
        batch_size: a.batch,
        max_epochs: a.epochs,
        seed: derive_seed(ctx.seed, &[2]),
        target_eps: Some(a.eps),
        eval_every: 10,
        ..TrainConfig::default()
    };
    let out = train_sweep_model(a.alpha_fn, a.depth, a.width, &cfg, a.n_train, a.n_val, ctx.seed)?;
    let path = ctx.out(&a.out);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    out.net.save_json(&path)?;
    io::write_records(&path.with_extension("history.csv"), &out.history)?;
    println!(
        "{}: best sup-norm validation error {:.4e} at epoch {} (target {} {})",
        a.alpha_fn,
        out.best_score(),
        out.best_epoch,
        a.eps,
        if out.converged { "met" } else { "not met" }
    );
    Ok(())
}

fn predict(ctx: &Ctx, a: PredictArgs) -> Result<()> {
    let model = MlpNetwork::load_json(&a.model)?;
    let signals = io::read_signals(&a.data)?;
    let rows = signals
        .iter()
        .map(|s| {
            Ok(Prediction {
                alpha_target: s.alpha_target,
                alpha_pred: model.forward(&s.samples)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = ctx.out(&a.out);
    io::write_records(&out, &rows)?;
    println!("wrote {} predictions to {}", rows.len(), out.display());
    Ok(())
}

fn run_oracle(ctx: &Ctx, a: OracleArgs) -> Result<()> {
    let (t, y) = io::read_xy(&a.data)?;
    let cfg = AlphaSearchConfig {
        alpha_min: a.alpha_min,
        alpha_max: a.alpha_max,
        grid_size: a.grid_size,
        refine: !a.no_refine,
        lambda: a.lambda,
        knot_step: a.knot_step,
        negate: a.negate,
        ..AlphaSearchConfig::default()
    };
    let r = oracle::optimal_alpha(&t, &y, &cfg)?;
    io::write_json(&ctx.out(&a.out), &r)?;
    println!("alpha* = {:.6}, sse = {:.6e}", r.alpha, r.sse);
    Ok(())
}

fn run_table1(ctx: &Ctx, a: Table1Args) -> Result<()> {
    let cfg = Table1Config {
        n_train: a.n_train,
        width_cap: a.width_cap,
        seed: ctx.seed,
        train: TrainConfig {
            max_epochs: a.epochs,
            ..Table1Config::default().train
        },
        ..Table1Config::default()
    };
    let mut rows = Vec::new();
    for f in &a.alpha_fn {
        rows.extend(table1::run_table1(*f, &a.eps_list, &a.depths, &cfg)?);
    }
    io::write_records(&ctx.out(&a.out), &rows)?;
    if let Some(p) = &a.plot {
        harness::plot_table1(&rows, &ctx.out(p))?;
    }
    for r in &rows {
        println!(
            "{} eps={} L={} W={} C_tot={}{}",
            r.alpha_fn,
            r.eps,
            r.depth,
            r.width,
            r.c_tot,
            if r.unmet { " (unmet)" } else { "" }
        );
    }
    Ok(())
}

fn run_scenarios(ctx: &Ctx, a: ScenarioArgs) -> Result<()> {
    let mut instances = Vec::new();
    let mut summary = Vec::new();
    for s in 0..a.seeds as u64 {
        let cfg = ScenarioConfig {
            n_train: a.n_train,
            n_enrich: a.n_enrich,
            n_test: a.n_test,
            seed: derive_seed(ctx.seed, &[s]),
            train: TrainConfig {
                max_epochs: a.epochs,
                ..ScenarioConfig::default().train
            },
            ..ScenarioConfig::default()
        };
        for &id in &a.scenario {
            let r = scenarios::run_scenario(id, &cfg)?;
            if let Some(dir) = &a.plots {
                harness::plot_scenario(&r, &ctx.out(dir))?;
            }
            println!(
                "scenario {id} seed {}: mean RE predicted {:.4e}, grid-search {:.4e}",
                r.seed, r.mean_re_pred, r.mean_re_oracle
            );
            instances.extend(r.instances.iter().cloned());
            summary.push(ScenarioSummary {
                scenario: id,
                seed: r.seed,
                mean_mse_pred: r.mean_mse_pred,
                mean_re_pred: r.mean_re_pred,
                mean_mse_oracle: r.mean_mse_oracle,
                mean_re_oracle: r.mean_re_oracle,
                skipped: r.skipped,
            });
        }
    }
    let out = ctx.out(&a.out);
    io::write_records(&out, &instances)?;
    io::write_records(&out.with_extension("summary.csv"), &summary)?;
    Ok(())
}

#[derive(Serialize)]
struct ScenarioSummary {
    scenario: u8,
    seed: u64,
    mean_mse_pred: f64,
    mean_re_pred: f64,
    mean_mse_oracle: f64,
    mean_re_oracle: f64,
    skipped: usize,
}

fn run_gengap(ctx: &Ctx, a: GenGapArgs) -> Result<()> {
    let defaults = GenGapConfig::default();
    let cfg = GenGapConfig {
        family: a.family,
        width: a.width,
        train: TrainConfig {
            max_epochs: a.epochs,
            ..defaults.train.clone()
        },
        pool_size: a.n_list.iter().copied().max().unwrap_or(defaults.pool_size),
        ..defaults
    };
    let records = harness::gengap_sweep(&a.n_list, &a.amplitudes, &a.levels, a.seeds, ctx.seed, &cfg)?;
    io::write_records(&ctx.out(&a.out), &records)?;
    if let Some(dir) = &a.plots {
        harness::plot_gengap(&records, &ctx.out(dir))?;
    }
    for t in harness::gap_trends(&records) {
        println!(
            "A={} J={}: spearman {:+.3}, bound-consistent {}",
            t.amplitude, t.level, t.spearman, t.bound_consistent
        );
    }
    Ok(())
}

fn wavelet(ctx: &Ctx, a: WaveletArgs) -> Result<()> {
    let signals = io::read_signals(&a.input)?;
    let len = signals.first().map_or(0, LabeledSignal::len);
    let proj = WaveletProjector::new(a.family, a.level, len)?;
    let projected = signals
        .into_iter()
        .map(|mut s| {
            s.samples = proj.project(&s.samples)?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    io::write_signals(&ctx.out(&a.out), &projected)?;
    Ok(())
}

#[derive(Serialize)]
struct AuditReport {
    prop1: stability::Prop1Report,
    bound: stability::BoundAudit,
}

fn audit(ctx: &Ctx, a: AuditArgs) -> Result<()> {
    let model = match &a.model {
        Some(p) => MlpNetwork::load_json(p)?,
        None => {
            let cfg = TrainConfig {
                seed: derive_seed(ctx.seed, &[2]),
                target_eps: Some(a.eps),
                eval_every: 10,
                ..TrainConfig::default()
            };
            train_sweep_model(a.alpha_fn, a.depth, a.width, &cfg, 1000, 200, ctx.seed)?.net
        }
    };
    let model = Arc::new(model);
    let spline = SplineConfig {
        lambda: a.lambda,
        knot_step: a.knot_step,
    };
    let t = datasets::time_grid(datasets::SWEEP_DIM, true);
    let grid: Vec<f64> = (0..a.grid_size).map(|i| i as f64 / (a.grid_size.max(2) - 1) as f64).collect();
    let m = Arc::clone(&model);
    let predict = move |s: &[f64]| m.forward(s).unwrap_or(f64::NAN);
    let prop1 = stability::audit_prop1(a.alpha_fn, &predict, &spline, &t, &grid)?;
    let (xs, _) = sweep_split(a.alpha_fn, &table1::test_abscissae(40))?;
    let bound = stability::bound_audit(&model, &xs, &t, &spline)?;
    println!(
        "prop1 holds: {} (eps_hat {:.3e}, L_eff {:.3e}); composite bound holds: {} ({:.3e} <= {:.3e})",
        prop1.holds, prop1.eps_hat, prop1.l_eff, bound.holds, bound.observed_composite, bound.composite_bound
    );
    io::write_json(&ctx.out(&a.out), &AuditReport { prop1, bound })?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
    }
    let ctx = Ctx {
        seed: cli.seed,
        out_dir: cli.out_dir,
    };
    match cli.command {
        Command::Basis(a) => basis(&ctx, a),
        Command::Fit(a) => fit(&ctx, a),
        Command::Gen(a) => gen(&ctx, a),
        Command::Train(a) => train(&ctx, a),
        Command::Predict(a) => predict(&ctx, a),
        Command::Oracle(a) => run_oracle(&ctx, a),
        Command::Table1(a) => run_table1(&ctx, a),
        Command::Scenarios(a) => run_scenarios(&ctx, a),
        Command::Gengap(a) => run_gengap(&ctx, a),
        Command::Wavelet(a) => wavelet(&ctx, a),
        Command::Audit(a) => audit(&ctx, a),
    }
}

/// Subcommand name and `--config` path, found before full parsing.
fn prescan(args: &[String]) -> (Option<String>, Option<PathBuf>) {
    let valued = ["--seed", "--config", "--out-dir", "--threads"];
    let mut sub = None;
    let mut cfg = None;
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            cfg = args.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = a.strip_prefix("--config=") {
            cfg = Some(PathBuf::from(p));
        }
        if valued.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if sub.is_none() && !a.starts_with('-') {
            sub = Some(a.clone());
        }
        i += 1;
    }
    (sub, cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut args: Vec<String> = std::env::args().collect();
    let (sub, cfg_path) = prescan(&args);
    if let Some(p) = cfg_path {
        let merged = std::fs::read_to_string(&p)
            .map_err(Error::from)
            .and_then(|text| config::merge_args(&args, &text, sub.as_deref()));
        match merged {
            Ok(m) => args = m,
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

//! Fully connected ReLU networks `R^d -> R` with a linear output unit.

use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;

/// Architecture with uniform hidden width. `depth` counts the input and
/// output layers, so there are `depth - 2` hidden layers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub depth: usize,
    pub width: usize,
}

impl MlpSpec {
    pub fn new(input_dim: usize, depth: usize, width: usize) -> Result<Self> {
        if input_dim == 0 || width == 0 {
            return Err(Error::invalid("input dimension and width must be positive"));
        }
        if depth < 3 {
            return Err(Error::invalid(format!("depth must be >= 3, got {depth}")));
        }
        Ok(Self { input_dim, depth, width })
    }

    pub fn hidden_layers(&self) -> usize {
        self.depth - 2
    }

    /// Layer sizes from input to output.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_dim];
        dims.extend(std::iter::repeat_n(self.width, self.hidden_layers()));
        dims.push(1);
        dims
    }
}

/// Connections plus one bias per computational unit.
pub fn complexity(spec: &MlpSpec) -> usize {
    let (d, w, l) = (spec.input_dim, spec.width, spec.depth);
    (d * w + w) + (l - 3) * (w * w + w) + (w + 1)
}

#[inline]
pub fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Dense layer; `weights` is `outputs × inputs`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Layer {
    inputs: usize,
    outputs: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl Layer {
    fn affine(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for r in 0..self.outputs {
            let row = &self.weights[r * self.inputs..(r + 1) * self.inputs];
            let mut acc = self.biases[r];
            for (w, xi) in row.iter().zip(x) {
                acc += w * xi;
            }
            out.push(acc);
        }
    }

    fn len(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    dims: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkFile", into = "NetworkFile")]
pub struct MlpNetwork {
    dims: Vec<usize>,
    layers: Vec<Layer>,
    seed: u64,
}

impl TryFrom<NetworkFile> for MlpNetwork {
    type Error = Error;

    fn try_from(f: NetworkFile) -> Result<Self> {
        let layers = f.weights.into_iter().zip(f.biases).collect();
        let mut net = Self::from_layers(&f.dims, layers)?;
        net.seed = f.seed;
        Ok(net)
    }
}

impl From<MlpNetwork> for NetworkFile {
    fn from(n: MlpNetwork) -> Self {
        let (weights, biases) = n.layers.into_iter().map(|l| (l.weights, l.biases)).unzip();
        NetworkFile {
            dims: n.dims,
            weights,
            biases,
            seed: n.seed,
        }
    }
}

impl MlpNetwork {
    /// He-style uniform initialization, `U(-√(6/fan_in), √(6/fan_in))`, zero biases.
    pub fn init(spec: &MlpSpec, seed: u64) -> Self {
        let dims = spec.dims();
        let mut rng = seeds::rng(seed);
        let layers = dims
            .windows(2)
            .map(|w| {
                let (inputs, outputs) = (w[0], w[1]);
                let limit = (6.0 / inputs as f64).sqrt();
                Layer {
                    inputs,
                    outputs,
                    weights: (0..inputs * outputs).map(|_| rng.random_range(-limit..limit)).collect(),
                    biases: vec![0.0; outputs],
                }
            })
            .collect();
        Self { dims, layers, seed }
    }

    /// Builds a network from explicit `(weights row-major, biases)` pairs.
    pub fn from_layers(dims: &[usize], layers: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(Error::invalid("need at least input and output layers of positive size"));
        }
        if *dims.last().unwrap() != 1 {
            return Err(Error::invalid("output dimension must be 1"));
        }
        if layers.len() != dims.len() - 1 {
            return Err(Error::invalid(format!(
                "expected {} layers for dims {:?}, got {}",
                dims.len() - 1,
                dims,
                layers.len()
            )));
        }
        let layers = dims
            .windows(2)
            .zip(layers)
            .map(|(w, (weights, biases))| {
                if weights.len() != w[0] * w[1] || biases.len() != w[1] {
                    return Err(Error::invalid(format!("layer {}x{} has wrong parameter count", w[1], w[0])));
                }
                if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("non-finite parameter"));
                }
                Ok(Layer {
                    inputs: w[0],
                    outputs: w[1],
                    weights,
                    biases,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dims: dims.to_vec(),
            layers,
            seed: 0,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The uniform-width spec, if the network has one.
    pub fn spec(&self) -> Option<MlpSpec> {
        let hidden = &self.dims[1..self.dims.len() - 1];
        let w = *hidden.first()?;
        hidden
            .iter()
            .all(|&x| x == w)
            .then_some(MlpSpec {
                input_dim: self.dims[0],
                depth: self.dims.len(),
                width: w,
            })
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    /// Flattened parameters, layer by layer, weights before biases.
    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            p.extend_from_slice(&l.weights);
            p.extend_from_slice(&l.biases);
        }
        p
    }

    pub fn set_params(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.num_params() {
            return Err(Error::invalid("parameter vector has the wrong length"));
        }
        let mut off = 0;
        for l in &mut self.layers {
            let nw = l.weights.len();
            l.weights.copy_from_slice(&p[off..off + nw]);
            off += nw;
            let nb = l.biases.len();
            l.biases.copy_from_slice(&p[off..off + nb]);
            off += nb;
        }
        Ok(())
    }

    /// Rewrites the first layer so that `F'(s) = F((s - mean) / scale)`.
    pub fn fold_input_affine(&mut self, mean: &[f64], scale: &[f64]) -> Result<()> {
        let d = self.input_dim();
        if mean.len() != d || scale.len() != d || scale.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::invalid("input affine map has the wrong shape or a non-positive scale"));
        }
        let l = &mut self.layers[0];
        for r in 0..l.outputs {
            let row = &mut l.weights[r * d..(r + 1) * d];
            let mut shift = 0.0;
            for ((w, m), s) in row.iter_mut().zip(mean).zip(scale) {
                *w /= s;
                shift += *w * m;
            }
            l.biases[r] -= shift;
        }
        Ok(())
    }

    /// Multiplies the weights (not biases) of layer `k` by `c`.
    pub fn scale_layer(&mut self, k: usize, c: f64) {
        for w in &mut self.layers[k].weights {
            *w *= c;
        }
    }

    pub fn forward(&self, s: &[f64]) -> Result<f64> {
        if s.len() != self.input_dim() {
            return Err(Error::invalid(format!(
                "input has length {}, network expects {}",
                s.len(),
                self.input_dim()
            )));
        }
        Ok(self.forward_unchecked(s))
    }

    pub(crate) fn forward_unchecked(&self, s: &[f64]) -> f64 {
        let mut cur = s.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (k, l) in self.layers.iter().enumerate() {
            l.affine(&cur, &mut next);
            if k < last {
                next.iter_mut().for_each(|v| *v = relu(*v));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        inputs.iter().map(|s| self.forward(s)).collect()
    }

    /// Adds `scale · ∂F(s)/∂θ` into `grad` (same layout as [`params`](Self::params))
    /// and returns `F(s)`. `scale` is evaluated from the output by `dscale`.
    fn backprop(&self, s: &[f64], dscale: impl Fn(f64) -> f64, grad: &mut [f64], acts: &mut Vec<Vec<f64>>) -> f64 {
        let nl = self.layers.len();
        acts.resize(nl + 1, Vec::new());
        acts[0].clear();
        acts[0].extend_from_slice(s);
        for k in 0..nl {
            let (head, tail) = acts.split_at_mut(k + 1);
            self.layers[k].affine(&head[k], &mut tail[0]);
            if k + 1 < nl {
                tail[0].iter_mut().for_each(|v| *v = relu(*v));
            }
        }
        let out = acts[nl][0];
        let mut delta = vec![dscale(out)];
        let mut offsets = Vec::with_capacity(nl);
        let mut off = 0;
        for l in &self.layers {
            offsets.push(off);
            off += l.len();
        }
        for k in (0..nl).rev() {
            let l = &self.layers[k];
            let input = &acts[k];
            let base = offsets[k];
            for r in 0..l.outputs {
                let d = delta[r];
                if d == 0.0 {
                    continue;
                }
                let row = &mut grad[base + r * l.inputs..base + (r + 1) * l.inputs];
                for (g, x) in row.iter_mut().zip(input) {
                    *g += d * x;
                }
                grad[base + l.weights.len() + r] += d;
            }
            if k > 0 {
                let mut prev = vec![0.0; l.inputs];
                for r in 0..l.outputs {
                    let d = delta[r];
                    if d == 0.0 {
                        continue;
                    }
                    let row = &l.weights[r * l.inputs..(r + 1) * l.inputs];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += d * w;
                    }
                }
                // derivative of ReLU taken as 0 at the kink
                for (p, a) in prev.iter_mut().zip(&acts[k]) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        out
    }

    /// Gradient of the output with respect to all parameters.
    pub fn output_gradient(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.input_dim() {
            return Err(Error::invalid("input length mismatch"));
        }
        let mut g = vec![0.0; self.num_params()];
        self.backprop(s, |_| 1.0, &mut g, &mut Vec::new());
        Ok(g)
    }

    /// Mean squared error over a dataset and its gradient.
    pub fn loss_and_gradient(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dataset(self, inputs, targets)?;
        let mut g = vec![0.0; self.num_params()];
        let mut acts = Vec::new();
        let n = inputs.len() as f64;
        let mut loss = 0.0;
        for (s, &y) in inputs.iter().zip(targets) {
            let out = self.backprop(s, |o| 2.0 * (o - y) / n, &mut g, &mut acts);
            loss += (out - y).powi(2);
        }
        Ok((loss / n, g))
    }

    /// Product of per-layer spectral norms.
    pub fn lipschitz_upper(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| {
                let m = DMatrix::from_row_slice(l.outputs, l.inputs, &l.weights);
                m.singular_values().max()
            })
            .product()
    }

    /// Largest difference quotient `|F(s) - F(s')| / ‖s - s'‖` over distinct pairs.
    pub fn lipschitz_empirical(&self, samples: &[Vec<f64>]) -> Result<f64> {
        if samples.len() < 2 {
            return Err(Error::invalid("empirical Lipschitz estimate needs at least two samples"));
        }
        let outs = self.predict(samples)?;
        let mut best = 0.0_f64;
        for i in 0..samples.len() {
            for j in i + 1..samples.len() {
                let dist = euclidean(&samples[i], &samples[j]);
                if dist > 0.0 {
                    best = best.max((outs[i] - outs[j]).abs() / dist);
                }
            }
        }
        Ok(best)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn check_dataset(net: &MlpNetwork, inputs: &[Vec<f64>], targets: &[f64]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::invalid("dataset is empty"));
    }
    if inputs.len() != targets.len() {
        return Err(Error::invalid("inputs and targets differ in length"));
    }
    if inputs.iter().any(|s| s.len() != net.input_dim()) {
        return Err(Error::invalid(format!("every input must have length {}", net.input_dim())));
    }
    if inputs.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::invalid("dataset contains non-finite values"));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    /// Stop once the sup-norm validation error is at most this value.
    pub target_eps: Option<f64>,
    /// Reshuffle the training order every epoch.
    pub shuffle: bool,
    /// L2 penalty coefficient added to the gradient.
    pub weight_decay: f64,
    /// Validation is evaluated every this many epochs (and at the last one).
    pub eval_every: usize,
    /// Train on per-feature standardized inputs, starting from an output
    /// bias equal to the mean target, and fold the input map into the first
    /// layer afterwards.
    pub standardize: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 32,
            max_epochs: 20_000,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            target_eps: None,
            shuffle: true,
            weight_decay: 0.0,
            eval_every: 1,
            standardize: true,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.batch_size > 0
            && self.max_epochs > 0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.adam_eps > 0.0
            && self.weight_decay >= 0.0
            && self.eval_every > 0
            && self.target_eps.is_none_or(|e| e > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid training configuration {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_max: Option<f64>,
    pub val_mse: Option<f64>,
    /// Best score so far: validation sup-norm error if available, else training mse.
    pub best: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub net: MlpNetwork,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    /// True if the target error was reached.
    pub converged: bool,
}

impl TrainOutcome {
    pub fn best_score(&self) -> f64 {
        self.history.last().map_or(f64::INFINITY, |r| r.best)
    }
}

/// Held-out data for the stopping rule.
#[derive(Clone, Copy, Debug)]
pub struct Validation<'a> {
    pub inputs: &'a [Vec<f64>],
    pub targets: &'a [f64],
}

/// Error statistics of a network on a dataset: `(max |F - y|, mean (F - y)²)`.
pub fn evaluate(net: &MlpNetwork, inputs: &[Vec<f64>], targets: &[f64]) -> Result<(f64, f64)> {
    check_dataset(net, inputs, targets)?;
    let mut max = 0.0_f64;
    let mut sq = 0.0;
    for (s, y) in inputs.iter().zip(targets) {
        let e = net.forward_unchecked(s) - y;
        max = max.max(e.abs());
        sq += e * e;
    }
    Ok((max, sq / inputs.len() as f64))
}

/// Per-feature mean and standard deviation; constant features get scale 1.
pub fn feature_moments(inputs: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = inputs.len() as f64;
    let d = inputs.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; d];
    for s in inputs {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v / n;
        }
    }
    let mut scale = vec![0.0; d];
    for s in inputs {
        for ((q, v), m) in scale.iter_mut().zip(s).zip(&mean) {
            *q += (v - m).powi(2) / n;
        }
    }
    for q in &mut scale {
        *q = q.sqrt();
        if *q < 1e-12 {
            *q = 1.0;
        }
    }
    (mean, scale)
}

fn standardized(inputs: &[Vec<f64>], mean: &[f64], scale: &[f64]) -> Vec<Vec<f64>> {
    inputs
        .iter()
        .map(|s| s.iter().zip(mean).zip(scale).map(|((v, m), q)| (v - m) / q).collect())
        .collect()
}

/// Mini-batch Adam on the mean squared error. Returns the best parameters seen.
///
/// With `cfg.standardize` the given network acts on standardized inputs
/// during training; the returned network takes raw inputs.
pub fn train(
    net: &MlpNetwork,
    inputs: &[Vec<f64>],
    targets: &[f64],
    validation: Option<Validation<'_>>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    check_dataset(net, inputs, targets)?;
    if let Some(v) = validation {
        check_dataset(net, v.inputs, v.targets)?;
    }
    if !cfg.standardize {
        return train_raw(net, inputs, targets, validation, cfg);
    }
    let (mean, scale) = feature_moments(inputs);
    let xs = standardized(inputs, &mean, &scale);
    let vs = validation.map(|v| standardized(v.inputs, &mean, &scale));
    let val = validation.zip(vs.as_deref()).map(|(v, x)| Validation {
        inputs: x,
        targets: v.targets,
    });
    let mut start = net.clone();
    // start the linear output at the mean target
    let last = start.layers.len() - 1;
    start.layers[last].biases[0] = targets.iter().sum::<f64>() / targets.len() as f64;
    let mut out = train_raw(&start, &xs, targets, val, cfg)?;
    out.net.fold_input_affine(&mean, &scale)?;
    Ok(out)
}

fn train_raw(
    net: &MlpNetwork,
    inputs: &[Vec<f64>],
    targets: &[f64],
    validation: Option<Validation<'_>>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let mut net = net.clone();
    let np = net.num_params();
    let mut theta = net.params();
    let mut m = vec![0.0; np];
    let mut v = vec![0.0; np];
    let mut grad = vec![0.0; np];
    let mut acts = Vec::new();
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let mut rng = seeds::rng(cfg.seed);
    let mut step = 0_i32;

    let mut best_theta = theta.clone();
    let mut best = f64::INFINITY;
    let mut best_epoch = 0;
    let mut history = Vec::new();
    let mut converged = false;

    for epoch in 1..=cfg.max_epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut train_sq = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let scale = 2.0 / batch.len() as f64;
            for &i in batch {
                let y = targets[i];
                let out = net.backprop(&inputs[i], |o| scale * (o - y), &mut grad, &mut acts);
                train_sq += (out - y).powi(2);
            }
            if cfg.weight_decay > 0.0 {
                for (g, t) in grad.iter_mut().zip(&theta) {
                    *g += cfg.weight_decay * t;
                }
            }
            step += 1;
            let bc1 = 1.0 - cfg.beta1.powi(step);
            let bc2 = 1.0 - cfg.beta2.powi(step);
            for k in 0..np {
                m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * grad[k];
                v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
                theta[k] -= cfg.learning_rate * (m[k] / bc1) / ((v[k] / bc2).sqrt() + cfg.adam_eps);
            }
            net.set_params(&theta)?;
        }
        // loss accumulated along the epoch, as is customary
        let train_mse = train_sq / inputs.len() as f64;
        if !train_mse.is_finite() || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Divergence { epoch });
        }
        if epoch % cfg.eval_every != 0 && epoch != cfg.max_epochs {
            continue;
        }
        let (val_max, val_mse, score) = match validation {
            Some(val) => {
                let (mx, mse) = evaluate(&net, val.inputs, val.targets)?;
                (Some(mx), Some(mse), mx)
            }
            None => (None, None, evaluate(&net, inputs, targets)?.1),
        };
        if score < best {
            best = score;
            best_theta.copy_from_slice(&theta);
            best_epoch = epoch;
        }
        history.push(EpochRecord {
            epoch,
            train_mse,
            val_max,
            val_mse,
            best,
        });
        if cfg.target_eps.is_some_and(|e| val_max.unwrap_or(score) <= e) {
            converged = true;
            break;
        }
    }
    net.set_params(&best_theta)?;
    Ok(TrainOutcome {
        net,
        history,
        best_epoch,
        converged,
    })
}

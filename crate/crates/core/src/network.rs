//! Small fully connected networks trained by plain gradient descent, the
//! XOR and two-moons tasks, and the loss-level sweep.
//!
//! Hidden layers use the configured activation; the output neuron is always
//! a pristine sigmoid feeding a clamped binary cross-entropy, so a degraded
//! hidden layer is the only thing that varies between runs.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::activations::{sigmoid, ActivationKind};
use crate::bogoliubov::{reconstruct, BogoliubovChannel};
use crate::spectral::Grid;
use crate::{Error, Result};

/// Outputs are clamped to `[ε, 1 − ε]` inside the cross-entropy.
pub const OUTPUT_CLAMP: f64 = 1e-7;
/// Epoch window for `mean_grad_norm_first100`.
pub const GRAD_NORM_WINDOW: usize = 100;
pub const XOR_LOSS_THRESHOLD: f64 = 0.05;
pub const MOONS_ACCURACY_THRESHOLD: f64 = 0.9;
const MOONS_PER_CLASS: usize = 100;
const MOONS_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetName {
    Xor,
    Moons,
}

impl DatasetName {
    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetName::Xor => "xor",
            DatasetName::Moons => "moons",
        }
    }
}

impl FromStr for DatasetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "xor" => Ok(DatasetName::Xor),
            "moons" => Ok(DatasetName::Moons),
            _ => Err(Error::UnknownDataset(s.into())),
        }
    }
}

/// Row-major `n × dim` inputs with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: DatasetName,
    dim: usize,
    inputs: Vec<f64>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn name(&self) -> DatasetName {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// XOR is the four corner points (seed ignored). Moons draws 100 points per
/// class from a ChaCha8 stream seeded with `seed`: `t ~ U[0, π]`, class 0 on
/// `(cos t, sin t)`, class 1 on `(1 − cos t, 0.5 − sin t)`, each coordinate
/// plus `N(0, 0.1²)` noise.
pub fn make_dataset(name: DatasetName, seed: u64) -> Dataset {
    match name {
        DatasetName::Xor => Dataset {
            name,
            dim: 2,
            inputs: alloc::vec![0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
            labels: alloc::vec![0, 1, 1, 0],
        },
        DatasetName::Moons => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, MOONS_NOISE).expect("valid noise scale");
            let mut inputs = Vec::with_capacity(4 * MOONS_PER_CLASS);
            let mut labels = Vec::with_capacity(2 * MOONS_PER_CLASS);
            for class in 0..2u8 {
                for _ in 0..MOONS_PER_CLASS {
                    let t = rng.random_range(0.0..=PI);
                    let (x, y) = if class == 0 {
                        (libm::cos(t), libm::sin(t))
                    } else {
                        (1.0 - libm::cos(t), 0.5 - libm::sin(t))
                    };
                    inputs.push(x + noise.sample(&mut rng));
                    inputs.push(y + noise.sample(&mut rng));
                    labels.push(class);
                }
            }
            Dataset {
                name,
                dim: 2,
                inputs,
                labels,
            }
        }
    }
}

pub fn make_dataset_named(name: &str, seed: u64) -> Result<Dataset> {
    Ok(make_dataset(name.parse()?, seed))
}

#[derive(Debug, Clone)]
pub struct MlpConfig {
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: ActivationKind,
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl MlpConfig {
    /// 2-4-1, lr 0.5, 2000 full-batch epochs.
    pub fn xor(hidden_activation: ActivationKind) -> Self {
        Self {
            layer_sizes: alloc::vec![2, 4, 1],
            hidden_activation,
            learning_rate: 0.5,
            max_epochs: 2000,
            batch_size: 4,
            seed: 0,
        }
    }

    /// 2-8-8-1, lr 0.1, 500 epochs of 32-point minibatches.
    pub fn moons(hidden_activation: ActivationKind) -> Self {
        Self {
            layer_sizes: alloc::vec![2, 8, 8, 1],
            hidden_activation,
            learning_rate: 0.1,
            max_epochs: 500,
            batch_size: 32,
            seed: 0,
        }
    }

    pub fn for_task(name: DatasetName, hidden_activation: ActivationKind) -> Self {
        match name {
            DatasetName::Xor => Self::xor(hidden_activation),
            DatasetName::Moons => Self::moons(hidden_activation),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_activation(mut self, hidden_activation: ActivationKind) -> Self {
        self.hidden_activation = hidden_activation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 3 {
            return Err(Error::config("need input, at least one hidden and an output layer"));
        }
        if self.layer_sizes.contains(&0) {
            return Err(Error::config("layer sizes must be positive"));
        }
        if *self.layer_sizes.last().unwrap() != 1 {
            return Err(Error::config("the output layer must have a single neuron"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning rate must be positive and finite"));
        }
        if self.max_epochs == 0 || self.batch_size == 0 {
            return Err(Error::config("max_epochs and batch_size must be positive"));
        }
        Ok(())
    }
}

/// Affine layer, weights row-major `[output][input]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: alloc::vec![0.0; inputs * outputs],
            biases: alloc::vec![0.0; outputs],
        }
    }

    fn affine(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.biases)
            .map(|(row, b)| row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b)
            .collect()
    }

    fn is_consistent(&self, inputs: usize, outputs: usize) -> bool {
        self.inputs == inputs
            && self.outputs == outputs
            && self.weights.len() == inputs * outputs
            && self.biases.len() == outputs
    }

    fn squared_norm(&self) -> f64 {
        self.weights.iter().chain(&self.biases).map(|v| v * v).sum()
    }
}

/// Parameters of a network; also used as the shape of its gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub layers: Vec<Dense>,
}

impl Network {
    pub fn zeros(layer_sizes: &[usize]) -> Self {
        Self {
            layers: layer_sizes
                .windows(2)
                .map(|w| Dense::zeros(w[0], w[1]))
                .collect(),
        }
    }

    /// Weights uniform on `[−0.5, 0.5]` in layer then row-major order,
    /// biases zero.
    pub fn init<R: Rng>(layer_sizes: &[usize], rng: &mut R) -> Self {
        let mut net = Self::zeros(layer_sizes);
        for layer in &mut net.layers {
            for w in &mut layer.weights {
                *w = rng.random_range(-0.5..=0.5);
            }
        }
        net
    }

    pub fn hidden_layers(&self) -> &[Dense] {
        &self.layers[..self.layers.len().saturating_sub(1)]
    }

    /// L2 norm over all hidden-layer weights and biases.
    pub fn hidden_norm(&self) -> f64 {
        libm::sqrt(self.hidden_layers().iter().map(Dense::squared_norm).sum())
    }

    fn check_shape(&self, layer_sizes: &[usize]) -> Result<()> {
        let ok = self.layers.len() + 1 == layer_sizes.len()
            && self
                .layers
                .iter()
                .zip(layer_sizes.windows(2))
                .all(|(l, w)| l.is_consistent(w[0], w[1]));
        if ok {
            Ok(())
        } else {
            Err(Error::config("network shape does not match layer sizes"))
        }
    }

    fn add_scaled(&mut self, other: &Network, factor: f64) {
        for (l, g) in self.layers.iter_mut().zip(&other.layers) {
            for (w, gw) in l.weights.iter_mut().zip(&g.weights) {
                *w += factor * gw;
            }
            for (b, gb) in l.biases.iter_mut().zip(&g.biases) {
                *b += factor * gb;
            }
        }
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    /// Affine outputs, one vector per layer.
    pub pre_activations: Vec<Vec<f64>>,
    /// `activations[0]` is the input; `activations[l + 1]` is layer `l`'s output.
    pub activations: Vec<Vec<f64>>,
    pub output: f64,
}

pub fn forward(config: &MlpConfig, network: &Network, input: &[f64]) -> Result<ForwardPass> {
    network.check_shape(&config.layer_sizes)?;
    if input.len() != config.layer_sizes[0] {
        return Err(Error::Dimension {
            expected: config.layer_sizes[0],
            got: input.len(),
        });
    }
    let last = network.layers.len() - 1;
    let mut pre_activations = Vec::with_capacity(network.layers.len());
    let mut activations = Vec::with_capacity(network.layers.len() + 1);
    activations.push(input.to_vec());
    for (l, layer) in network.layers.iter().enumerate() {
        let z = layer.affine(activations.last().unwrap());
        let a = if l == last {
            z.iter().map(|&v| sigmoid(v)).collect()
        } else {
            z.iter().map(|&v| config.hidden_activation.evaluate(v)).collect()
        };
        pre_activations.push(z);
        activations.push(a);
    }
    let output = activations.last().unwrap()[0];
    Ok(ForwardPass {
        pre_activations,
        activations,
        output,
    })
}

fn cross_entropy(output: f64, label: u8) -> f64 {
    let p = output.clamp(OUTPUT_CLAMP, 1.0 - OUTPUT_CLAMP);
    if label == 1 {
        -libm::log(p)
    } else {
        -libm::log(1.0 - p)
    }
}

/// Accumulates `scale · ∂loss/∂θ` for one example into `grad`.
fn backprop_into(
    config: &MlpConfig,
    network: &Network,
    pass: &ForwardPass,
    label: u8,
    scale: f64,
    grad: &mut Network,
) {
    // sigmoid output with cross-entropy: ∂loss/∂z_out = p − y
    let mut delta = alloc::vec![(pass.output - f64::from(label)) * scale];
    for l in (0..network.layers.len()).rev() {
        let input = &pass.activations[l];
        let g = &mut grad.layers[l];
        for (o, d) in delta.iter().enumerate() {
            g.biases[o] += d;
            for (i, x) in input.iter().enumerate() {
                g.weights[o * g.inputs + i] += d * x;
            }
        }
        if l == 0 {
            break;
        }
        let layer = &network.layers[l];
        let below = &pass.pre_activations[l - 1];
        delta = (0..layer.inputs)
            .map(|i| {
                let back: f64 = delta
                    .iter()
                    .enumerate()
                    .map(|(o, d)| d * layer.weights[o * layer.inputs + i])
                    .sum();
                back * config.hidden_activation.derivative_ae(below[i])
            })
            .collect();
    }
}

/// Mean cross-entropy over `indices` and its gradient.
pub fn batch_gradient(
    config: &MlpConfig,
    network: &Network,
    dataset: &Dataset,
    indices: &[usize],
) -> Result<(Network, f64)> {
    let mut grad = Network::zeros(&config.layer_sizes);
    let scale = 1.0 / indices.len() as f64;
    let mut loss = 0.0;
    for &i in indices {
        let pass = forward(config, network, dataset.input(i))?;
        loss += cross_entropy(pass.output, dataset.label(i));
        backprop_into(config, network, &pass, dataset.label(i), scale, &mut grad);
    }
    Ok((grad, loss * scale))
}

/// Central-difference estimate of the batch-loss gradient, one parameter at
/// a time.
pub fn numerical_gradient(
    config: &MlpConfig,
    network: &Network,
    dataset: &Dataset,
    indices: &[usize],
    step: f64,
) -> Result<Network> {
    network.check_shape(&config.layer_sizes)?;
    let loss_at = |net: &Network| -> Result<f64> {
        let mut loss = 0.0;
        for &i in indices {
            loss += cross_entropy(forward(config, net, dataset.input(i))?.output, dataset.label(i));
        }
        Ok(loss / indices.len() as f64)
    };
    let mut probe = network.clone();
    let mut grad = Network::zeros(&config.layer_sizes);
    for l in 0..network.layers.len() {
        let n_weights = network.layers[l].weights.len();
        for p in 0..n_weights + network.layers[l].biases.len() {
            let original = param(&probe, l, p);
            set_param(&mut probe, l, p, original + step);
            let up = loss_at(&probe)?;
            set_param(&mut probe, l, p, original - step);
            let down = loss_at(&probe)?;
            set_param(&mut probe, l, p, original);
            set_param(&mut grad, l, p, (up - down) / (2.0 * step));
        }
    }
    Ok(grad)
}

/// Relative disagreement `‖a − b‖ / max(‖a‖, ‖b‖)` over all parameters;
/// zero when both vanish.
pub fn gradient_discrepancy(a: &Network, b: &Network) -> f64 {
    let mut diff = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (la, lb) in a.layers.iter().zip(&b.layers) {
        for (x, y) in la.weights.iter().chain(&la.biases).zip(lb.weights.iter().chain(&lb.biases)) {
            diff += (x - y) * (x - y);
            na += x * x;
            nb += y * y;
        }
    }
    let scale = libm::sqrt(if na > nb { na } else { nb });
    if scale == 0.0 {
        0.0
    } else {
        libm::sqrt(diff) / scale
    }
}

fn param(net: &Network, layer: usize, p: usize) -> f64 {
    let l = &net.layers[layer];
    if p < l.weights.len() {
        l.weights[p]
    } else {
        l.biases[p - l.weights.len()]
    }
}

fn set_param(net: &mut Network, layer: usize, p: usize, value: f64) {
    let l = &mut net.layers[layer];
    let n = l.weights.len();
    if p < n {
        l.weights[p] = value;
    } else {
        l.biases[p - n] = value;
    }
}

/// Mean cross-entropy and 0.5-threshold accuracy over the whole dataset.
pub fn dataset_metrics(config: &MlpConfig, network: &Network, dataset: &Dataset) -> Result<(f64, f64)> {
    let mut loss = 0.0;
    let mut correct = 0usize;
    for i in 0..dataset.len() {
        let out = forward(config, network, dataset.input(i))?.output;
        loss += cross_entropy(out, dataset.label(i));
        if u8::from(out > 0.5) == dataset.label(i) {
            correct += 1;
        }
    }
    let n = dataset.len() as f64;
    Ok((loss / n, correct as f64 / n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub final_accuracy: f64,
    pub final_loss: f64,
    /// First epoch (1-based) that met the task threshold; `None` for never.
    pub epochs_to_threshold: Option<usize>,
    /// Mean hidden-layer gradient norm over the updates of the first 100 epochs.
    pub mean_grad_norm_first100: f64,
    pub loss_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub report: TrainReport,
    pub initial: Network,
    pub trained: Network,
}

fn threshold_met(name: DatasetName, loss: f64, accuracy: f64) -> bool {
    match name {
        DatasetName::Xor => loss < XOR_LOSS_THRESHOLD,
        DatasetName::Moons => accuracy >= MOONS_ACCURACY_THRESHOLD,
    }
}

/// Trains from the seeded initialization and keeps both endpoints.
///
/// One ChaCha8 stream seeded with `config.seed` draws the initial weights
/// and then the per-epoch shuffles (only when `batch_size` is smaller than
/// the dataset).
pub fn train_detailed(config: &MlpConfig, dataset: &Dataset) -> Result<TrainOutcome> {
    config.validate()?;
    if dataset.dim() != config.layer_sizes[0] {
        return Err(Error::Dimension {
            expected: config.layer_sizes[0],
            got: dataset.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial = Network::init(&config.layer_sizes, &mut rng);
    let mut network = initial.clone();
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let minibatch = config.batch_size < dataset.len();

    let mut norm_sum = 0.0;
    let mut norm_count = 0usize;
    let mut epochs_to_threshold = None;
    let mut final_loss = 0.0;
    let mut final_accuracy = 0.0;

    for epoch in 0..config.max_epochs {
        if minibatch {
            order.shuffle(&mut rng);
        }
        for batch in order.chunks(config.batch_size) {
            let (grad, _) = batch_gradient(config, &network, dataset, batch)?;
            if epoch < GRAD_NORM_WINDOW {
                norm_sum += grad.hidden_norm();
                norm_count += 1;
            }
            network.add_scaled(&grad, -config.learning_rate);
        }
        (final_loss, final_accuracy) = dataset_metrics(config, &network, dataset)?;
        if epochs_to_threshold.is_none() && threshold_met(dataset.name(), final_loss, final_accuracy) {
            epochs_to_threshold = Some(epoch + 1);
        }
    }

    Ok(TrainOutcome {
        report: TrainReport {
            final_accuracy,
            final_loss,
            epochs_to_threshold,
            mean_grad_norm_first100: if norm_count > 0 { norm_sum / norm_count as f64 } else { 0.0 },
            loss_fraction: config.hidden_activation.loss_fraction(),
            seed: config.seed,
        },
        initial,
        trained: network,
    })
}

pub fn train(config: &MlpConfig, dataset: &Dataset) -> Result<TrainReport> {
    Ok(train_detailed(config, dataset)?.report)
}

/// Full-batch hidden-layer gradient norm at a given weight point.
pub fn hidden_gradient_norm(config: &MlpConfig, network: &Network, dataset: &Dataset) -> Result<f64> {
    let all: Vec<usize> = (0..dataset.len()).collect();
    Ok(batch_gradient(config, network, dataset, &all)?.0.hidden_norm())
}

/// One `(loss level, seed)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub iota: f64,
    pub report: TrainReport,
}

/// Degraded activations behind `uniform(ι)` channels, one per level.
pub fn sweep_activations(grid: Grid, loss_levels: &[f64]) -> Result<Vec<ActivationKind>> {
    if loss_levels.windows(2).any(|w| w[0].is_nan() || w[1].is_nan() || w[0] > w[1]) {
        return Err(Error::config("loss levels must be sorted ascending"));
    }
    loss_levels
        .iter()
        .map(|&iota| {
            let channel = BogoliubovChannel::uniform(grid, iota)?;
            Ok(ActivationKind::Degraded(Arc::new(reconstruct(&channel)?)))
        })
        .collect()
}

/// Trains every `(level, seed)` cell in level-major order. `config_template`
/// supplies everything except the hidden activation and the seed.
pub fn sweep(
    config_template: &MlpConfig,
    dataset: &Dataset,
    grid: Grid,
    loss_levels: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    let activations = sweep_activations(grid, loss_levels)?;
    let mut rows = Vec::with_capacity(loss_levels.len() * seeds.len());
    for (&iota, activation) in loss_levels.iter().zip(activations) {
        for &seed in seeds {
            let config = config_template
                .clone()
                .with_activation(activation.clone())
                .with_seed(seed);
            rows.push(SweepRow {
                iota,
                report: train(&config, dataset)?,
            });
        }
    }
    Ok(rows)
}

/// Median over the extended reals: an even count averages the two middle
/// values, and any average involving "never" is "never".
pub fn median_epochs(values: &[Option<usize>]) -> Option<f64> {
    let mut v: Vec<f64> = values
        .iter()
        .map(|e| e.map_or(f64::INFINITY, |n| n as f64))
        .collect();
    let m = median(&mut v)?;
    m.is_finite().then_some(m)
}

/// Median of a slice (sorted in place); `None` when empty.
pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Per-level medians of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSummary {
    pub iota: f64,
    pub median_epochs: Option<f64>,
    pub median_grad_norm: f64,
    pub median_accuracy: f64,
    pub converged: usize,
    pub runs: usize,
}

pub fn summarize(rows: &[SweepRow]) -> Vec<LevelSummary> {
    let mut out: Vec<LevelSummary> = Vec::new();
    let mut start = 0;
    while start < rows.len() {
        let iota = rows[start].iota;
        let end = start + rows[start..].iter().take_while(|r| r.iota == iota).count();
        let cell = &rows[start..end];
        let epochs: Vec<Option<usize>> = cell.iter().map(|r| r.report.epochs_to_threshold).collect();
        let mut norms: Vec<f64> = cell.iter().map(|r| r.report.mean_grad_norm_first100).collect();
        let mut accs: Vec<f64> = cell.iter().map(|r| r.report.final_accuracy).collect();
        out.push(LevelSummary {
            iota,
            median_epochs: median_epochs(&epochs),
            median_grad_norm: median(&mut norms).unwrap_or(0.0),
            median_accuracy: median(&mut accs).unwrap_or(0.0),
            converged: epochs.iter().filter(|e| e.is_some()).count(),
            runs: cell.len(),
        });
        start = end;
    }
    out
}

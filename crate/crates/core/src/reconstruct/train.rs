use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::frame::{FrameStream, FrameTensor};
use super::model::{validate_architecture, Activation, DenseLayer, ReconstructorKind, ReconstructorModel};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Training hyperparameters. Plain mini-batch SGD with a fixed learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden_sizes: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Preceding frames consumed by a sequence model; ignored otherwise.
    pub history_k: usize,
    pub activation: Activation,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden_sizes: vec![32],
            learning_rate: 8.0,
            epochs: 40,
            batch_size: 16,
            seed: 0,
            history_k: 3,
            activation: Activation::Sigmoid,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Per-layer gradients, same shapes as the model's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient<T> {
    pub weights: Vec<Vec<T>>,
    pub biases: Vec<Vec<T>>,
}

impl<T: Scalar> Gradient<T> {
    fn zeros_like(model: &ReconstructorModel<T>) -> Self {
        Self {
            weights: model.layers.iter().map(|l| vec![T::zero(); l.weights.len()]).collect(),
            biases: model.layers.iter().map(|l| vec![T::zero(); l.biases.len()]).collect(),
        }
    }

    fn reset(&mut self) {
        self.weights.iter_mut().chain(self.biases.iter_mut()).for_each(|g| g.fill(T::zero()));
    }
}

/// Diagnostics returned alongside a trained model.
#[derive(Debug, Clone)]
pub struct TrainOutcome<T> {
    pub model: ReconstructorModel<T>,
    /// Mean reconstruction error of the untrained model over the training samples.
    pub initial_error: T,
    /// Mean reconstruction error of the returned model.
    pub final_error: T,
    /// Mean training loss after each epoch (only when requested).
    pub epoch_losses: Vec<T>,
}

/// Layer sizes implied by `kind`, the frame size and the hidden sizes.
pub fn layer_sizes_for(kind: ReconstructorKind, frame_len: usize, cfg: &TrainConfig) -> Result<Vec<usize>> {
    let input = if kind.is_sequence() { cfg.history_k * frame_len } else { frame_len };
    let mut sizes = Vec::with_capacity(cfg.hidden_sizes.len() + 2);
    sizes.push(input);
    sizes.extend_from_slice(&cfg.hidden_sizes);
    sizes.push(frame_len);
    let history = if kind.is_sequence() { cfg.history_k } else { 1 };
    validate_architecture(kind, history, &sizes)?;
    Ok(sizes)
}

/// Fresh model with weights and biases uniform in `±1/√fan_in`.
pub fn init_model<T: Scalar>(
    kind: ReconstructorKind,
    frame_len: usize,
    cfg: &TrainConfig,
) -> Result<ReconstructorModel<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    init_with_rng(kind, frame_len, cfg, &mut rng)
}

fn init_with_rng<T: Scalar>(
    kind: ReconstructorKind,
    frame_len: usize,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ReconstructorModel<T>> {
    let sizes = layer_sizes_for(kind, frame_len, cfg)?;
    let layers = sizes
        .windows(2)
        .map(|pair| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            let mut draw = || T::lit(rng.random_range(-bound..=bound));
            let weights = (0..fan_in * fan_out).map(|_| draw()).collect();
            let biases = (0..fan_out).map(|_| draw()).collect();
            DenseLayer::new(fan_in, fan_out, weights, biases)
        })
        .collect::<Result<Vec<_>>>()?;
    let history = if kind.is_sequence() { cfg.history_k } else { 1 };
    ReconstructorModel::from_layers(kind, cfg.activation, history, layers)
}

/// Scratch buffers for one forward/backward pass.
struct Scratch<T> {
    activations: Vec<Vec<T>>,
    deltas: Vec<Vec<T>>,
}

impl<T: Scalar> Scratch<T> {
    fn new(model: &ReconstructorModel<T>) -> Self {
        let sizes = model.layer_sizes();
        Self {
            activations: sizes.iter().map(|&s| vec![T::zero(); s]).collect(),
            deltas: sizes.iter().map(|&s| vec![T::zero(); s]).collect(),
        }
    }
}

impl<T: Scalar> ReconstructorModel<T> {
    /// Pre-clamp mean squared error for one sample and its gradient with
    /// respect to every weight and bias.
    pub fn loss_and_gradient(&self, input: &[T], target: &[T]) -> (T, Gradient<T>) {
        let mut grad = Gradient::zeros_like(self);
        let mut scratch = Scratch::new(self);
        let loss = self.accumulate(input, target, &mut grad, &mut scratch);
        (loss, grad)
    }

    /// Mean training loss (pre-clamp MSE) over `(input, target)` pairs.
    pub fn loss(&self, input: &[T], target: &[T]) -> T {
        let out = self.forward(input);
        super::frame::mean_squared_diff(&out, target)
    }

    pub fn weight_mut(&mut self, layer: usize, index: usize) -> &mut T {
        &mut self.layers[layer].weights[index]
    }

    pub fn bias_mut(&mut self, layer: usize, index: usize) -> &mut T {
        &mut self.layers[layer].biases[index]
    }

    fn accumulate(&self, input: &[T], target: &[T], grad: &mut Gradient<T>, s: &mut Scratch<T>) -> T {
        let n_layers = self.layers.len();
        s.activations[0].copy_from_slice(input);
        for (i, layer) in self.layers.iter().enumerate() {
            let (before, after) = s.activations.split_at_mut(i + 1);
            let out = &mut after[0];
            layer.forward_into(&before[i], out);
            if i + 1 != n_layers {
                for v in out.iter_mut() {
                    *v = self.activation.apply(*v);
                }
            }
        }

        let d = from_usize::<T>(target.len());
        let two_over_d = T::lit(2.0) / d;
        let output = &s.activations[n_layers];
        let mut loss = T::zero();
        for ((delta, &y), &t) in s.deltas[n_layers].iter_mut().zip(output).zip(target) {
            let diff = y - t;
            loss = loss + diff * diff;
            *delta = two_over_d * diff;
        }
        loss = loss / d;

        for i in (0..n_layers).rev() {
            let layer = &self.layers[i];
            let (lower, upper) = s.deltas.split_at_mut(i + 1);
            let delta = &upper[0];
            let x = &s.activations[i];
            let gw = &mut grad.weights[i];
            let gb = &mut grad.biases[i];
            for (j, &dj) in delta.iter().enumerate() {
                gb[j] = gb[j] + dj;
                let row = &mut gw[j * layer.inputs..(j + 1) * layer.inputs];
                for (g, &xv) in row.iter_mut().zip(x) {
                    *g = *g + dj * xv;
                }
            }
            if i > 0 {
                let din = &mut lower[i];
                din.fill(T::zero());
                for (j, &dj) in delta.iter().enumerate() {
                    let row = &layer.weights[j * layer.inputs..(j + 1) * layer.inputs];
                    for (acc, &w) in din.iter_mut().zip(row) {
                        *acc = *acc + w * dj;
                    }
                }
                for (acc, &a) in din.iter_mut().zip(x) {
                    *acc = *acc * self.activation.derivative_from_output(a);
                }
            }
        }
        loss
    }

    fn apply_gradient(&mut self, grad: &Gradient<T>, step: T) {
        for (layer, (gw, gb)) in self.layers.iter_mut().zip(grad.weights.iter().zip(&grad.biases)) {
            for (w, &g) in layer.weights.iter_mut().zip(gw) {
                *w = *w - step * g;
            }
            for (b, &g) in layer.biases.iter_mut().zip(gb) {
                *b = *b - step * g;
            }
        }
    }
}

/// A training sample: stream index and target frame index.
#[derive(Debug, Clone, Copy)]
struct Sample {
    stream: usize,
    frame: usize,
}

fn collect_samples<T: Scalar>(
    kind: ReconstructorKind,
    streams: &[FrameStream<T>],
    history_k: usize,
) -> Result<Vec<Sample>> {
    let warm = if kind.is_sequence() { history_k } else { 0 };
    let mut samples = Vec::new();
    for (s, stream) in streams.iter().enumerate() {
        samples.extend((warm..stream.len()).map(|frame| Sample { stream: s, frame }));
    }
    if samples.is_empty() {
        let total: usize = streams.iter().map(FrameStream::len).sum();
        return Err(if total == 0 { Error::EmptyStream } else { Error::StreamTooShort { needed: warm, got: total } });
    }
    Ok(samples)
}

fn fill_input<T: Scalar>(kind: ReconstructorKind, frames: &[FrameTensor<T>], i: usize, k: usize, buf: &mut [T]) {
    if kind.is_sequence() {
        let len = frames[i].len();
        for (slot, f) in frames[i - k..i].iter().enumerate() {
            buf[slot * len..(slot + 1) * len].copy_from_slice(f.pixels());
        }
    } else {
        buf.copy_from_slice(frames[i].pixels());
    }
}

/// Trains a reconstructor on one nominal stream.
pub fn train_reconstructor<T: Scalar>(
    stream: &FrameStream<T>,
    kind: ReconstructorKind,
    cfg: &TrainConfig,
) -> Result<ReconstructorModel<T>> {
    train_on_streams(std::slice::from_ref(stream), kind, cfg, false).map(|o| o.model)
}

/// Trains on several nominal streams. Sequence windows never cross stream
/// boundaries. Deterministic given `cfg.seed`: the seed fixes both the
/// initial weights and the per-epoch batch order.
pub fn train_on_streams<T: Scalar>(
    streams: &[FrameStream<T>],
    kind: ReconstructorKind,
    cfg: &TrainConfig,
    track_epoch_loss: bool,
) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    let dims = streams.iter().find_map(FrameStream::dims).ok_or(Error::EmptyStream)?;
    if let Some(bad) = streams.iter().filter_map(FrameStream::dims).find(|d| *d != dims) {
        return Err(Error::DimensionMismatch { expected: format!("{dims:?}"), found: format!("{bad:?}") });
    }
    let frame_len = dims.0 * dims.1 * dims.2;
    let k = if kind.is_sequence() { cfg.history_k } else { 1 };
    if kind.is_sequence() && k == 0 {
        return Err(Error::InvalidConfig("history_k must be >= 1 for sequence models".into()));
    }
    let mut samples = collect_samples(kind, streams, k)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model: ReconstructorModel<T> = init_with_rng(kind, frame_len, cfg, &mut rng)?;
    let mut input = vec![T::zero(); model.layers[0].inputs];
    let mut grad = Gradient::zeros_like(&model);
    let mut scratch = Scratch::new(&model);

    let n_samples = samples.len();
    let mean_error = |m: &ReconstructorModel<T>| -> Result<T> {
        let mut total = T::zero();
        for st in streams {
            if st.len() > m.warm_up() {
                let series = m.error_series(st)?;
                total = total + series.values().iter().copied().sum::<T>();
            }
        }
        Ok(total / from_usize::<T>(n_samples))
    };

    let initial = model.clone();
    let initial_error = mean_error(&model)?;
    let lr = T::lit(cfg.learning_rate);
    let mut epoch_losses = Vec::new();

    for _ in 0..cfg.epochs {
        samples.shuffle(&mut rng);
        for batch in samples.chunks(cfg.batch_size) {
            grad.reset();
            for s in batch {
                let frames = streams[s.stream].frames();
                fill_input(kind, frames, s.frame, k, &mut input);
                model.accumulate(&input, frames[s.frame].pixels(), &mut grad, &mut scratch);
            }
            model.apply_gradient(&grad, lr / from_usize::<T>(batch.len()));
        }
        if track_epoch_loss {
            let mut total = T::zero();
            for s in &samples {
                let frames = streams[s.stream].frames();
                fill_input(kind, frames, s.frame, k, &mut input);
                total = total + model.loss(&input, frames[s.frame].pixels());
            }
            epoch_losses.push(total / from_usize::<T>(samples.len()));
        }
    }

    let mut final_error = mean_error(&model)?;
    if !(final_error <= initial_error) {
        model = initial;
        final_error = initial_error;
    }
    Ok(TrainOutcome { model, initial_error, final_error, epoch_losses })
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{mean_squared_diff, ErrorSeries, FrameStream, FrameTensor};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ReconstructorKind {
    /// Single-hidden-layer autoencoder.
    Sae,
    /// Deep fully-connected autoencoder with five weight layers.
    Dae,
    /// Predicts the current frame from the `history_k` preceding frames.
    Seq,
}

impl ReconstructorKind {
    pub fn is_sequence(self) -> bool {
        matches!(self, ReconstructorKind::Seq)
    }
}

impl std::str::FromStr for ReconstructorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sae" => Ok(Self::Sae),
            "dae" => Ok(Self::Dae),
            "seq" => Ok(Self::Seq),
            other => Err(Error::InvalidConfig(format!("unknown reconstructor kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Sigmoid,
    Relu,
}

impl Activation {
    #[inline]
    pub(crate) fn apply<T: Scalar>(self, v: T) -> T {
        match self {
            Activation::Sigmoid => (T::one() + (-v).exp()).recip(),
            Activation::Relu => v.max(T::zero()),
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    pub(crate) fn derivative_from_output<T: Scalar>(self, out: T) -> T {
        match self {
            Activation::Sigmoid => out * (T::one() - out),
            Activation::Relu => {
                if out > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// Fully-connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<T> {
    pub(crate) inputs: usize,
    pub(crate) outputs: usize,
    pub(crate) weights: Vec<T>,
    pub(crate) biases: Vec<T>,
}

impl<T: Scalar> DenseLayer<T> {
    pub fn new(inputs: usize, outputs: usize, weights: Vec<T>, biases: Vec<T>) -> Result<Self> {
        if weights.len() != inputs * outputs || biases.len() != outputs {
            return Err(Error::InvalidConfig(format!(
                "layer {inputs}->{outputs} needs {} weights and {outputs} biases, got {} and {}",
                inputs * outputs,
                weights.len(),
                biases.len()
            )));
        }
        Ok(Self { inputs, outputs, weights, biases })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    #[inline]
    pub(crate) fn forward_into(&self, x: &[T], out: &mut [T]) {
        for (j, o) in out.iter_mut().enumerate() {
            let row = &self.weights[j * self.inputs..(j + 1) * self.inputs];
            *o = row.iter().zip(x).fold(self.biases[j], |acc, (&w, &v)| acc + w * v);
        }
    }
}

/// A trained (or freshly initialized) reconstructor.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructorModel<T> {
    pub(crate) kind: ReconstructorKind,
    pub(crate) activation: Activation,
    pub(crate) history_k: usize,
    pub(crate) layers: Vec<DenseLayer<T>>,
}

impl<T: Scalar> ReconstructorModel<T> {
    /// Assembles a model from explicit layers, checking that sizes chain and
    /// that the architecture matches `kind`.
    pub fn from_layers(
        kind: ReconstructorKind,
        activation: Activation,
        history_k: usize,
        layers: Vec<DenseLayer<T>>,
    ) -> Result<Self> {
        let sizes: Vec<usize> = match layers.first() {
            None => return Err(Error::InvalidConfig("model has no layers".into())),
            Some(first) => std::iter::once(first.inputs).chain(layers.iter().map(|l| l.outputs)).collect(),
        };
        for (i, pair) in layers.windows(2).enumerate() {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::InvalidConfig(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    pair[0].outputs,
                    i + 1,
                    pair[1].inputs
                )));
            }
        }
        validate_architecture(kind, history_k, &sizes)?;
        Ok(Self { kind, activation, history_k, layers })
    }

    pub fn kind(&self) -> ReconstructorKind {
        self.kind
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    /// Frames consumed per reconstruction (1 for single-image reconstructors).
    pub fn history_k(&self) -> usize {
        self.history_k
    }

    pub fn layers(&self) -> &[DenseLayer<T>] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].inputs).chain(self.layers.iter().map(|l| l.outputs)).collect()
    }

    /// Pixels per frame.
    pub fn frame_len(&self) -> usize {
        self.layers.last().map(|l| l.outputs).unwrap_or(0)
    }

    /// Unclamped network output for a flat input vector.
    pub fn forward(&self, input: &[T]) -> Vec<T> {
        let mut cur = input.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = vec![T::zero(); layer.outputs];
            layer.forward_into(&cur, &mut out);
            if i != last {
                for v in out.iter_mut() {
                    *v = self.activation.apply(*v);
                }
            }
            cur = out;
        }
        cur
    }

    /// Reconstructs (or predicts) a frame from `history`: one frame for
    /// single-image models, the `history_k` preceding frames for sequence
    /// models. Output pixels are clamped to `[0, 1]`.
    pub fn reconstruct(&self, history: &[FrameTensor<T>]) -> Result<FrameTensor<T>> {
        if history.len() != self.history_k {
            return Err(Error::HistoryLength { expected: self.history_k, got: history.len() });
        }
        let (w, h, c) = history[0].dims();
        if history.iter().any(|f| f.dims() != (w, h, c)) {
            return Err(Error::DimensionMismatch {
                expected: format!("{:?}", (w, h, c)),
                found: "mixed frame shapes in history".into(),
            });
        }
        if w * h * c != self.frame_len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} pixels per frame", self.frame_len()),
                found: format!("{} pixels", w * h * c),
            });
        }
        let input: Vec<T> = history.iter().flat_map(|f| f.pixels().iter().copied()).collect();
        FrameTensor::from_clamped(w, h, c, self.forward(&input))
    }

    /// Error of the reconstruction targeting frame `i` of `frames`.
    pub(crate) fn error_at(&self, frames: &[FrameTensor<T>], i: usize) -> Result<T> {
        let target = &frames[i];
        let recon = if self.kind.is_sequence() {
            self.reconstruct(&frames[i - self.history_k..i])?
        } else {
            self.reconstruct(std::slice::from_ref(target))?
        };
        Ok(mean_squared_diff(target.pixels(), recon.pixels()))
    }

    /// First frame index that has a reconstruction.
    pub fn warm_up(&self) -> usize {
        if self.kind.is_sequence() {
            self.history_k
        } else {
            0
        }
    }

    /// Reconstruction error for every reconstructable frame of `stream`.
    pub fn error_series(&self, stream: &FrameStream<T>) -> Result<ErrorSeries<T>> {
        let start = self.warm_up();
        if stream.len() <= start || stream.is_empty() {
            return Err(Error::StreamTooShort { needed: start, got: stream.len() });
        }
        let frames = stream.frames();
        let values =
            (start..frames.len()).into_par_iter().map(|i| self.error_at(frames, i)).collect::<Result<Vec<T>>>()?;
        ErrorSeries::new(values, start)
    }
}

/// Free-function form of [`ReconstructorModel::error_series`].
pub fn error_series<T: Scalar>(model: &ReconstructorModel<T>, stream: &FrameStream<T>) -> Result<ErrorSeries<T>> {
    model.error_series(stream)
}

pub(crate) fn validate_architecture(kind: ReconstructorKind, history_k: usize, sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 || sizes.contains(&0) {
        return Err(Error::InvalidConfig(format!("invalid layer sizes {sizes:?}")));
    }
    let input = sizes[0];
    let output = *sizes.last().unwrap();
    let weight_layers = sizes.len() - 1;
    match kind {
        ReconstructorKind::Sae | ReconstructorKind::Dae => {
            if history_k != 1 {
                return Err(Error::InvalidConfig(format!("{kind:?} consumes one frame, history_k={history_k}")));
            }
            if input != output {
                return Err(Error::InvalidConfig(format!("autoencoder input {input} != output {output}")));
            }
            let expected = if kind == ReconstructorKind::Sae { 2 } else { 5 };
            if weight_layers != expected {
                return Err(Error::InvalidConfig(format!(
                    "{kind:?} needs {expected} weight layers, got {weight_layers}"
                )));
            }
        }
        ReconstructorKind::Seq => {
            if history_k == 0 || input != history_k * output {
                return Err(Error::InvalidConfig(format!(
                    "sequence model input {input} must equal history_k ({history_k}) x output ({output})"
                )));
            }
        }
    }
    Ok(())
}

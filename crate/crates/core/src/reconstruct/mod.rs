//! Reconstructors of nominal camera frames and the per-frame reconstruction
//! error they produce.

mod frame;
pub mod io;
mod model;
mod train;

pub use frame::{reconstruction_error, ErrorSeries, FrameStream, FrameTensor};
pub use model::{error_series, Activation, DenseLayer, ReconstructorKind, ReconstructorModel};
pub use train::{
    init_model, layer_sizes_for, train_on_streams, train_reconstructor, Gradient, TrainConfig, TrainOutcome,
};

//! Small neural-network engine with hand-written gradients: MLP, linear
//! probe and raw-waveform 1-D CNN, trained with Adam, a plateau learning
//! rate schedule and early stopping.
//!
//! Inputs are processed one at a time and gradients are accumulated over a
//! mini-batch, so waveforms of different lengths never need padding to a
//! common size.

mod adam;
mod checkpoint;
mod loss;
mod model;
mod real;
mod train;

pub use adam::Adam;
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use loss::{cross_entropy, softmax};
pub use model::{
    adaptive_avg_pool, argmax, Activation, CnnSpec, ConvLayerSpec, Layer, LinearProbeSpec, MlpSpec, Model,
    ModelSpec, Tensor, Trace,
};
pub use real::Real;
pub use train::{
    compute_gradients, train, uar_of_present, write_history_csv, EpochRecord, Samples, Standardizer, TrainConfig,
    TrainedModel,
};

//! Neural-operator stack: tensors with a reverse-mode tape, 2D FFT, Fourier
//! and Galerkin-attention operators, Adam and the training loop.

mod checkpoint;
mod fft;
mod model;
mod spectral;
mod tape;
mod tensor;
mod train;

use std::fmt::Debug;

use rustfft::num_traits::Float;
use rustfft::FftNum;
use thiserror::Error;

pub use checkpoint::{decode_checkpoint, encode_checkpoint, read_checkpoint, write_checkpoint, CHECKPOINT_VERSION};
pub use fft::{fft2, ifft2, Fft2};
pub use model::{
    fno_forward, galerkin_attention, tno_forward, Activation, ArchConfig, FnoConfig, OperatorModel, Param, TnoConfig,
};
pub use spectral::spectral_conv;
pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;
pub use train::{evaluate, rel_l2, rel_l2_grid, train, Adam, EpochStats, TrainConfig};

pub use rustfft::num_complex::Complex;

/// Floating-point element type: `f32` for training, `f64` for gradient checks.
pub trait Real: Float + FftNum + Default + Debug + Send + Sync + 'static {
    fn of(v: f64) -> Self;
    fn f64(self) -> f64;
}

impl Real for f32 {
    fn of(v: f64) -> Self {
        v as f32
    }
    fn f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn of(v: f64) -> Self {
        v
    }
    fn f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NnError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("modes ({m1}, {m2}) exceed half the resolution {n1}x{n2}")]
    ModesExceedResolution { m1: usize, m2: usize, n1: usize, n2: usize },
    #[error("variable {0} was not recorded on this tape")]
    UnknownVar(usize),
    #[error("backward needs a scalar root, got shape {0:?}")]
    NonScalarRoot(Vec<usize>),
    #[error("non-finite loss at epoch {epoch}, batch {batch} (parameter norm {param_norm:.4e})")]
    NonFiniteLoss { epoch: usize, batch: usize, param_norm: f64 },
    #[error("truth has zero norm")]
    ZeroNorm,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("missing parameter {0}")]
    MissingParam(String),
    #[error("checkpoint: {msg} at byte {offset}")]
    Checkpoint { msg: String, offset: usize },
    #[error("io: {0}")]
    Io(String),
}

//! Networks as programs over coproducts of layer shapes.
//!
//! Forward propagation is a fold whose carrier is a continuation
//! `input -> activations`; backpropagation is either an unfold driven by
//! [`backward_coalgebra`] or a second fold whose carrier is a continuation
//! `BackProp -> network`. Training composes the two ([`train_meta`]) or fuses
//! them into one fold over pairs ([`train_fold`]).

mod algebra;
mod backprop;
mod layers;
mod train;

pub use algebra::{BackwardAlgebra, BackwardCoalgebra, BackwardPass, ForwardAlgebra, ForwardPass};
pub use backprop::{backward, BackProp, NextLayer};
pub use layers::{
    dense_forward, dense_network, dense_parameters, denselayer, fc_network, inputlayer,
    random_matrix, random_vector, with_dense_parameters, Dense, DenseLayer, FullyConnected, Input,
    InputLayer, Network,
};
pub use train::{
    backward_algebra, backward_coalgebra, backward_generator, forward, forward_algebra,
    forward_fixpoint, forward_generator, output_error, train_fold, train_many, train_meta,
    train_meta_fixpoint, Sample,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BackpropMode, Vector, ZipMode};

/// Activations that flow between layers: plain vectors for fully connected
/// networks, 3-D tensors for convolutional ones.
pub trait Signal: Clone + 'static {
    fn values(&self) -> &[f64];

    /// Wraps the output of a dense layer.
    fn from_values(values: Vec<f64>) -> Self;
}

impl Signal for Vector {
    fn values(&self) -> &[f64] {
        self
    }

    fn from_values(values: Vec<f64>) -> Self {
        Vector::from_raw(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub backprop_mode: BackpropMode,
    /// Zip semantics of forward propagation. Backpropagation always uses
    /// `Truncate` in verbatim mode and `Strict` in standard mode.
    pub zip_mode: ZipMode,
    pub seed: u64,
}

impl Default for TrainConfig {
    /// `η = 1`, which leaves the update `w ⊖ ΔW` unscaled.
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1.0,
            backprop_mode: BackpropMode::Standard,
            zip_mode: ZipMode::Strict,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn standard(learning_rate: f64) -> Self {
        TrainConfig {
            learning_rate,
            ..TrainConfig::default()
        }
    }

    pub fn paper_verbatim() -> Self {
        TrainConfig {
            backprop_mode: BackpropMode::PaperVerbatim,
            zip_mode: ZipMode::Truncate,
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate > 0.0 && self.learning_rate.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "learning rate must be positive and finite, got {}",
                self.learning_rate
            )))
        }
    }
}

/// Half-open range `[lo, hi)` for uniform parameter initialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitRange {
    pub lo: f64,
    pub hi: f64,
}

impl InitRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(InitRange { lo, hi })
        } else {
            Err(Error::InvalidConfig(format!(
                "init range needs finite lo < hi, got {lo}:{hi}"
            )))
        }
    }
}

impl Default for InitRange {
    fn default() -> Self {
        InitRange { lo: 0.0, hi: 1.0 }
    }
}

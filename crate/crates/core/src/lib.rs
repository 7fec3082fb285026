//! Neural networks expressed with folds and unfolds over layer shapes.

pub mod conv;
pub mod error;
pub mod gradcheck;
pub mod linalg;
pub mod network;
pub mod persist;
pub mod recursion;
pub mod rng;

pub use conv::{FilterBank, Tensor3};
pub use error::{DepthExceeded, Error, Result};
pub use linalg::{BackpropMode, Matrix, Vector, ZipMode};
pub use network::{BackProp, InitRange, Signal, TrainConfig};
pub use rng::SplitMix64;

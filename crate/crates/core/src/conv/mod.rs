//! Convolution, max pooling and ReLU as further layer shapes.
//!
//! The layers plug into the same forward algebra, backward algebra and
//! backward coalgebra as dense layers; only the per-layer arithmetic is new.
//! Tensor layers pass the loss gradient with respect to their input down as
//! [`NextLayer::Gradient`](crate::network::NextLayer::Gradient).

mod layers;
mod ops;
mod tensor;
mod xo;

pub use layers::{
    conv_network, convlayer, poollayer, relulayer, Conv, ConvLayer, ConvNetwork, Pool, PoolLayer,
    ReLu, ReLuLayer,
};
pub use ops::{
    conv_backward, conv_forward, conv_gradients, conv_output_dims, pool_backward, pool_forward,
    pool_output_dims, relu_backward, relu_forward, ArgmaxMap, ConvGradients,
};
pub use tensor::{FilterBank, Tensor3};
pub use xo::{xo_dataset, Glyph, IMAGE_SIZE};

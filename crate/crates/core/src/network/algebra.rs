use super::backprop::dense_update;
use super::layers::{dense_forward, Dense, DenseLayer, Input, InputLayer};
use super::{BackProp, Signal, TrainConfig};
use crate::error::Result;
use crate::linalg::ZipMode;
use crate::recursion::{Coproduct, Shape, Sum};

/// Carrier of the forward fold: input in, activations out (newest first).
pub type ForwardPass<X> = Box<dyn Fn(X) -> Result<Vec<X>>>;

/// Carrier of the backward fold: consumes the backpropagation record for
/// this layer and returns the updated layer.
pub type BackwardPass<N, X> = Box<dyn FnOnce(BackProp<X>) -> Result<N>>;

pub trait ForwardAlgebra<X: Signal>: Shape + 'static {
    /// Extends the forward pass of the preceding layers with this layer.
    fn forward_layer(layer: Self::Of<ForwardPass<X>>, zip: ZipMode) -> ForwardPass<X>;
}

pub trait BackwardAlgebra<X: Signal>: Shape + 'static {
    /// Updates this layer, then hands the threaded record to the
    /// continuation in its slot.
    fn backward_layer<N: 'static>(
        layer: Self::Of<BackwardPass<N, X>>,
        cfg: TrainConfig,
    ) -> BackwardPass<Self::Of<N>, X>;
}

pub trait BackwardCoalgebra<X: Signal>: Shape + 'static {
    /// Updates this layer and pairs its predecessor with the threaded record.
    fn backward_step<N>(
        layer: Self::Of<N>,
        bp: BackProp<X>,
        cfg: &TrainConfig,
    ) -> Result<Self::Of<(N, BackProp<X>)>>;
}

impl<X: Signal> ForwardAlgebra<X> for Input {
    fn forward_layer(_: InputLayer<ForwardPass<X>>, _: ZipMode) -> ForwardPass<X> {
        Box::new(|a0| Ok(vec![a0]))
    }
}

impl<X: Signal> BackwardAlgebra<X> for Input {
    fn backward_layer<N: 'static>(
        _: InputLayer<BackwardPass<N, X>>,
        _: TrainConfig,
    ) -> BackwardPass<InputLayer<N>, X> {
        Box::new(|_| Ok(InputLayer::new()))
    }
}

impl<X: Signal> BackwardCoalgebra<X> for Input {
    fn backward_step<N>(
        _: InputLayer<N>,
        _: BackProp<X>,
        _: &TrainConfig,
    ) -> Result<InputLayer<(N, BackProp<X>)>> {
        Ok(InputLayer::new())
    }
}

impl<X: Signal> ForwardAlgebra<X> for Dense {
    fn forward_layer(layer: DenseLayer<ForwardPass<X>>, zip: ZipMode) -> ForwardPass<X> {
        let DenseLayer {
            weights,
            biases,
            prev,
        } = layer;
        Box::new(move |a0| {
            let mut outputs = prev(a0)?;
            let a = dense_forward(&weights, &biases, &outputs[0], zip)?;
            outputs.insert(0, a);
            Ok(outputs)
        })
    }
}

impl<X: Signal> BackwardAlgebra<X> for Dense {
    fn backward_layer<N: 'static>(
        layer: DenseLayer<BackwardPass<N, X>>,
        cfg: TrainConfig,
    ) -> BackwardPass<DenseLayer<N>, X> {
        let DenseLayer {
            weights,
            biases,
            prev,
        } = layer;
        Box::new(move |bp| {
            let (weights, biases, threaded) = dense_update(&weights, &biases, bp, &cfg)?;
            Ok(DenseLayer {
                weights,
                biases,
                prev: prev(threaded)?,
            })
        })
    }
}

impl<X: Signal> BackwardCoalgebra<X> for Dense {
    fn backward_step<N>(
        layer: DenseLayer<N>,
        bp: BackProp<X>,
        cfg: &TrainConfig,
    ) -> Result<DenseLayer<(N, BackProp<X>)>> {
        let (weights, biases, threaded) = dense_update(&layer.weights, &layer.biases, bp, cfg)?;
        Ok(DenseLayer {
            weights,
            biases,
            prev: (layer.prev, threaded),
        })
    }
}

impl<X: Signal, F: ForwardAlgebra<X>, G: ForwardAlgebra<X>> ForwardAlgebra<X> for Sum<F, G> {
    fn forward_layer(
        layer: Coproduct<F::Of<ForwardPass<X>>, G::Of<ForwardPass<X>>>,
        zip: ZipMode,
    ) -> ForwardPass<X> {
        match layer {
            Coproduct::Left(l) => F::forward_layer(l, zip),
            Coproduct::Right(r) => G::forward_layer(r, zip),
        }
    }
}

impl<X: Signal, F: BackwardAlgebra<X>, G: BackwardAlgebra<X>> BackwardAlgebra<X> for Sum<F, G> {
    fn backward_layer<N: 'static>(
        layer: Coproduct<F::Of<BackwardPass<N, X>>, G::Of<BackwardPass<N, X>>>,
        cfg: TrainConfig,
    ) -> BackwardPass<Coproduct<F::Of<N>, G::Of<N>>, X> {
        match layer {
            Coproduct::Left(l) => {
                let k = F::backward_layer(l, cfg);
                Box::new(move |bp| k(bp).map(Coproduct::Left))
            }
            Coproduct::Right(r) => {
                let k = G::backward_layer(r, cfg);
                Box::new(move |bp| k(bp).map(Coproduct::Right))
            }
        }
    }
}

impl<X: Signal, F: BackwardCoalgebra<X>, G: BackwardCoalgebra<X>> BackwardCoalgebra<X>
    for Sum<F, G>
{
    fn backward_step<N>(
        layer: Coproduct<F::Of<N>, G::Of<N>>,
        bp: BackProp<X>,
        cfg: &TrainConfig,
    ) -> Result<Coproduct<F::Of<(N, BackProp<X>)>, G::Of<(N, BackProp<X>)>>> {
        match layer {
            Coproduct::Left(l) => F::backward_step(l, bp, cfg).map(Coproduct::Left),
            Coproduct::Right(r) => G::backward_step(r, bp, cfg).map(Coproduct::Right),
        }
    }
}

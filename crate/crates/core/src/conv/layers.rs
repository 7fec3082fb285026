use super::ops::{
    conv_backward, conv_forward, pool_backward, pool_forward, relu_backward, relu_forward,
};
use super::tensor::{FilterBank, Tensor3};
use crate::error::{Error, Result};
use crate::linalg::ZipMode;
use crate::network::{
    denselayer, inputlayer, random_matrix, random_vector, BackProp, BackwardAlgebra,
    BackwardCoalgebra, BackwardPass, Dense, ForwardAlgebra, ForwardPass, InitRange, Input, Network,
    NextLayer, TrainConfig,
};
use crate::recursion::{Member, Program, Shape, Sum};
use crate::rng::SplitMix64;

pub enum Conv {}
pub enum Pool {}
pub enum ReLu {}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer<K> {
    pub bank: FilterBank,
    pub prev: K,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoolLayer<K> {
    pub window: usize,
    pub stride: usize,
    pub prev: K,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReLuLayer<K> {
    pub prev: K,
}

impl Shape for Conv {
    type Of<T> = ConvLayer<T>;

    fn map_slots<A, B>(node: ConvLayer<A>, mut f: impl FnMut(A) -> B) -> ConvLayer<B> {
        ConvLayer {
            bank: node.bank,
            prev: f(node.prev),
        }
    }

    fn map_slots_ref<'a, A: 'a, B>(
        node: &'a ConvLayer<A>,
        mut f: impl FnMut(&'a A) -> B,
    ) -> ConvLayer<B> {
        ConvLayer {
            bank: node.bank.clone(),
            prev: f(&node.prev),
        }
    }
}

impl Shape for Pool {
    type Of<T> = PoolLayer<T>;

    fn map_slots<A, B>(node: PoolLayer<A>, mut f: impl FnMut(A) -> B) -> PoolLayer<B> {
        PoolLayer {
            window: node.window,
            stride: node.stride,
            prev: f(node.prev),
        }
    }

    fn map_slots_ref<'a, A: 'a, B>(
        node: &'a PoolLayer<A>,
        mut f: impl FnMut(&'a A) -> B,
    ) -> PoolLayer<B> {
        PoolLayer {
            window: node.window,
            stride: node.stride,
            prev: f(&node.prev),
        }
    }
}

impl Shape for ReLu {
    type Of<T> = ReLuLayer<T>;

    fn map_slots<A, B>(node: ReLuLayer<A>, mut f: impl FnMut(A) -> B) -> ReLuLayer<B> {
        ReLuLayer { prev: f(node.prev) }
    }

    fn map_slots_ref<'a, A: 'a, B>(
        node: &'a ReLuLayer<A>,
        mut f: impl FnMut(&'a A) -> B,
    ) -> ReLuLayer<B> {
        ReLuLayer {
            prev: f(&node.prev),
        }
    }
}

pub type ConvNetwork = Sum<Input, Sum<Dense, Sum<Conv, Sum<Pool, ReLu>>>>;

/// Upstream gradient of a tensor layer, shaped like its output.
fn upstream_tensor(bp: &BackProp<Tensor3>) -> Result<Tensor3> {
    let (output, _) = bp.current()?;
    let g = bp.upstream(ZipMode::Strict)?;
    let (w, h, d) = output.dims();
    Tensor3::new(w, h, d, g.into_vec())
}

fn threaded(bp: BackProp<Tensor3>, input_grad: Tensor3) -> BackProp<Tensor3> {
    bp.thread(NextLayer::Gradient(crate::linalg::Vector::from_raw(
        input_grad.into_vec(),
    )))
}

pub(crate) fn conv_step(
    bank: &FilterBank,
    bp: BackProp<Tensor3>,
    cfg: &TrainConfig,
) -> Result<(FilterBank, BackProp<Tensor3>)> {
    let upstream = upstream_tensor(&bp)?;
    let (_, input) = bp.current()?;
    let (bank, input_grad) = conv_backward(bank, input, &upstream, cfg.learning_rate)?;
    Ok((bank, threaded(bp, input_grad)))
}

pub(crate) fn pool_step(
    window: usize,
    stride: usize,
    bp: BackProp<Tensor3>,
) -> Result<BackProp<Tensor3>> {
    let upstream = upstream_tensor(&bp)?;
    let (_, input) = bp.current()?;
    let (_, argmax) = pool_forward(window, stride, input)?;
    let input_grad = pool_backward(&argmax, &upstream)?;
    Ok(threaded(bp, input_grad))
}

pub(crate) fn relu_step(bp: BackProp<Tensor3>) -> Result<BackProp<Tensor3>> {
    let upstream = upstream_tensor(&bp)?;
    let (_, input) = bp.current()?;
    let input_grad = relu_backward(input, &upstream)?;
    Ok(threaded(bp, input_grad))
}

fn extend(
    prev: ForwardPass<Tensor3>,
    layer: impl Fn(&Tensor3) -> Result<Tensor3> + 'static,
) -> ForwardPass<Tensor3> {
    Box::new(move |a0| {
        let mut outputs = prev(a0)?;
        let a = layer(&outputs[0])?;
        outputs.insert(0, a);
        Ok(outputs)
    })
}

impl ForwardAlgebra<Tensor3> for Conv {
    fn forward_layer(layer: ConvLayer<ForwardPass<Tensor3>>, _: ZipMode) -> ForwardPass<Tensor3> {
        let ConvLayer { bank, prev } = layer;
        extend(prev, move |a| conv_forward(&bank, a))
    }
}

impl ForwardAlgebra<Tensor3> for Pool {
    fn forward_layer(layer: PoolLayer<ForwardPass<Tensor3>>, _: ZipMode) -> ForwardPass<Tensor3> {
        let PoolLayer {
            window,
            stride,
            prev,
        } = layer;
        extend(prev, move |a| {
            pool_forward(window, stride, a).map(|(out, _)| out)
        })
    }
}

impl ForwardAlgebra<Tensor3> for ReLu {
    fn forward_layer(layer: ReLuLayer<ForwardPass<Tensor3>>, _: ZipMode) -> ForwardPass<Tensor3> {
        extend(layer.prev, |a| Ok(relu_forward(a)))
    }
}

impl BackwardAlgebra<Tensor3> for Conv {
    fn backward_layer<N: 'static>(
        layer: ConvLayer<BackwardPass<N, Tensor3>>,
        cfg: TrainConfig,
    ) -> BackwardPass<ConvLayer<N>, Tensor3> {
        let ConvLayer { bank, prev } = layer;
        Box::new(move |bp| {
            let (bank, bp) = conv_step(&bank, bp, &cfg)?;
            Ok(ConvLayer {
                bank,
                prev: prev(bp)?,
            })
        })
    }
}

impl BackwardAlgebra<Tensor3> for Pool {
    fn backward_layer<N: 'static>(
        layer: PoolLayer<BackwardPass<N, Tensor3>>,
        _: TrainConfig,
    ) -> BackwardPass<PoolLayer<N>, Tensor3> {
        let PoolLayer {
            window,
            stride,
            prev,
        } = layer;
        Box::new(move |bp| {
            let bp = pool_step(window, stride, bp)?;
            Ok(PoolLayer {
                window,
                stride,
                prev: prev(bp)?,
            })
        })
    }
}

impl BackwardAlgebra<Tensor3> for ReLu {
    fn backward_layer<N: 'static>(
        layer: ReLuLayer<BackwardPass<N, Tensor3>>,
        _: TrainConfig,
    ) -> BackwardPass<ReLuLayer<N>, Tensor3> {
        let prev = layer.prev;
        Box::new(move |bp| {
            Ok(ReLuLayer {
                prev: prev(relu_step(bp)?)?,
            })
        })
    }
}

impl BackwardCoalgebra<Tensor3> for Conv {
    fn backward_step<N>(
        layer: ConvLayer<N>,
        bp: BackProp<Tensor3>,
        cfg: &TrainConfig,
    ) -> Result<ConvLayer<(N, BackProp<Tensor3>)>> {
        let (bank, bp) = conv_step(&layer.bank, bp, cfg)?;
        Ok(ConvLayer {
            bank,
            prev: (layer.prev, bp),
        })
    }
}

impl BackwardCoalgebra<Tensor3> for Pool {
    fn backward_step<N>(
        layer: PoolLayer<N>,
        bp: BackProp<Tensor3>,
        _: &TrainConfig,
    ) -> Result<PoolLayer<(N, BackProp<Tensor3>)>> {
        let bp = pool_step(layer.window, layer.stride, bp)?;
        Ok(PoolLayer {
            window: layer.window,
            stride: layer.stride,
            prev: (layer.prev, bp),
        })
    }
}

impl BackwardCoalgebra<Tensor3> for ReLu {
    fn backward_step<N>(
        layer: ReLuLayer<N>,
        bp: BackProp<Tensor3>,
        _: &TrainConfig,
    ) -> Result<ReLuLayer<(N, BackProp<Tensor3>)>> {
        Ok(ReLuLayer {
            prev: (layer.prev, relu_step(bp)?),
        })
    }
}

pub fn convlayer<S, I>(bank: FilterBank) -> Program<S, ()>
where
    S: Member<Conv, I>,
{
    Program::step(S::inject(ConvLayer {
        bank,
        prev: Program::pure(()),
    }))
}

pub fn poollayer<S, I>(window: usize, stride: usize) -> Result<Program<S, ()>>
where
    S: Member<Pool, I>,
{
    if window == 0 || stride == 0 {
        return Err(Error::InvalidConfig(format!(
            "pool window and stride must be positive, got {window} and {stride}"
        )));
    }
    Ok(Program::step(S::inject(PoolLayer {
        window,
        stride,
        prev: Program::pure(()),
    })))
}

pub fn relulayer<S, I>() -> Program<S, ()>
where
    S: Member<ReLu, I>,
{
    Program::step(S::inject(ReLuLayer {
        prev: Program::pure(()),
    }))
}

/// The X/O classifier: dense(2×8) ∘ conv(2,2,1,2) ∘ conv(2,2,4,1) ∘
/// pool(2,1) ∘ conv(3,3,1,4) ∘ input, for 7×7×1 images.
///
/// Parameters are drawn outermost layer first. Convolution biases start at
/// zero. The dense layer reads the 2×2×2 convolution output in storage
/// order.
pub fn conv_network(rng: &mut SplitMix64, init: InitRange) -> Result<Network<ConvNetwork>> {
    let dense_w = random_matrix(2, 8, rng, init)?;
    let dense_b = random_vector(2, rng, init)?;
    let conv3 = FilterBank::random(2, 2, 1, 2, rng, init)?;
    let conv2 = FilterBank::random(2, 2, 4, 1, rng, init)?;
    let conv1 = FilterBank::random(3, 3, 1, 4, rng, init)?;
    Ok(denselayer::<ConvNetwork, _>(dense_w, dense_b)?
        .then(convlayer::<ConvNetwork, _>(conv3))
        .then(convlayer::<ConvNetwork, _>(conv2))
        .then(poollayer::<ConvNetwork, _>(2, 1)?)
        .then(convlayer::<ConvNetwork, _>(conv1))
        .then(inputlayer::<ConvNetwork, _, ()>()))
}

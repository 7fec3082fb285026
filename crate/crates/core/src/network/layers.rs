use std::marker::PhantomData;

use super::{InitRange, Signal};
use crate::error::{Error, Result};
use crate::linalg::{mat_vec, sigmoid, vec_add, Matrix, Vector, ZipMode};
use crate::recursion::{eval, split_ref, Member, Program, ProgramNode, Shape, Sum};
use crate::rng::SplitMix64;

/// The input layer: no parameters and no predecessor.
pub enum Input {}

/// A fully connected sigmoid layer.
pub enum Dense {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InputLayer<K>(PhantomData<K>);

impl<K> InputLayer<K> {
    pub fn new() -> Self {
        InputLayer(PhantomData)
    }
}

/// `weights` is `out × in`; `prev` is the preceding layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer<K> {
    pub weights: Matrix,
    pub biases: Vector,
    pub prev: K,
}

impl Shape for Input {
    type Of<T> = InputLayer<T>;

    fn map_slots<A, B>(_: InputLayer<A>, _: impl FnMut(A) -> B) -> InputLayer<B> {
        InputLayer::new()
    }

    fn map_slots_ref<'a, A: 'a, B>(
        _: &'a InputLayer<A>,
        _: impl FnMut(&'a A) -> B,
    ) -> InputLayer<B> {
        InputLayer::new()
    }
}

impl Shape for Dense {
    type Of<T> = DenseLayer<T>;

    fn map_slots<A, B>(node: DenseLayer<A>, mut f: impl FnMut(A) -> B) -> DenseLayer<B> {
        DenseLayer {
            weights: node.weights,
            biases: node.biases,
            prev: f(node.prev),
        }
    }

    fn map_slots_ref<'a, A: 'a, B>(
        node: &'a DenseLayer<A>,
        mut f: impl FnMut(&'a A) -> B,
    ) -> DenseLayer<B> {
        DenseLayer {
            weights: node.weights.clone(),
            biases: node.biases.clone(),
            prev: f(&node.prev),
        }
    }
}

pub type FullyConnected = Sum<Input, Dense>;

/// A network built from the layer shapes in `S`, outermost layer first.
pub type Network<S> = Program<S, ()>;

/// `σ(w · a + b)`.
pub fn dense_forward<X: Signal>(
    weights: &Matrix,
    biases: &Vector,
    input: &X,
    zip: ZipMode,
) -> Result<X> {
    let z = vec_add(&mat_vec(weights, input.values(), zip)?, biases, zip)?;
    Ok(X::from_values(sigmoid(&z).into_vec()))
}

/// A dense layer with a `Pure` hole for its predecessor.
pub fn denselayer<S, I>(weights: Matrix, biases: Vector) -> Result<Program<S, ()>>
where
    S: Member<Dense, I>,
{
    if biases.len() != weights.rows() {
        return Err(Error::dims("denselayer", weights.rows(), biases.len()));
    }
    Ok(Program::step(S::inject(DenseLayer {
        weights,
        biases,
        prev: Program::pure(()),
    })))
}

pub fn inputlayer<S, I, A>() -> Program<S, A>
where
    S: Member<Input, I>,
{
    Program::step(S::inject(InputLayer::new()))
}

/// Row-major draws from `init`.
pub fn random_matrix(
    rows: usize,
    cols: usize,
    rng: &mut SplitMix64,
    init: InitRange,
) -> Result<Matrix> {
    let data = (0..rows * cols)
        .map(|_| rng.uniform(init.lo, init.hi))
        .collect();
    Matrix::new(rows, cols, data)
}

pub fn random_vector(len: usize, rng: &mut SplitMix64, init: InitRange) -> Result<Vector> {
    Vector::new((0..len).map(|_| rng.uniform(init.lo, init.hi)).collect())
}

/// A dense network with layer widths `widths = [input, hidden.., output]`.
///
/// Parameters are drawn outermost layer first, each layer's weights
/// (row-major) before its biases.
pub fn dense_network<S, Id, Ii>(
    widths: &[usize],
    rng: &mut SplitMix64,
    init: InitRange,
) -> Result<Network<S>>
where
    S: Member<Dense, Id> + Member<Input, Ii>,
{
    if widths.len() < 2 || widths.contains(&0) {
        return Err(Error::InvalidConfig(format!(
            "a dense network needs at least two non-zero widths, got {widths:?}"
        )));
    }
    let mut layers = Vec::with_capacity(widths.len() - 1);
    for pair in widths.windows(2).rev() {
        let (fan_in, fan_out) = (pair[0], pair[1]);
        let w = random_matrix(fan_out, fan_in, rng, init)?;
        let b = random_vector(fan_out, rng, init)?;
        layers.push((w, b));
    }
    let mut network = inputlayer::<S, Ii, ()>();
    for (w, b) in layers.into_iter().rev() {
        network = denselayer::<S, Id>(w, b)?.then(network);
    }
    Ok(network)
}

/// `(weights, biases)` of every dense layer, outermost first.
pub fn dense_parameters<S, I, A>(network: &Program<S, A>) -> Vec<(Matrix, Vector)>
where
    S: Member<Dense, I>,
{
    let mut params = Vec::new();
    let mut stack = vec![network];
    while let Some(p) = stack.pop() {
        if let ProgramNode::Step(layer) = p.view() {
            if let Some(d) = S::project_ref(layer) {
                params.push((d.weights.clone(), d.biases.clone()));
            }
            let (_, children) = split_ref::<S, _>(layer);
            stack.extend(children.into_iter().rev());
        }
    }
    params
}

/// Replaces the parameters of every dense layer, outermost first. Each
/// replacement must keep the layer's dimensions.
pub fn with_dense_parameters<S, I, A>(
    network: Program<S, A>,
    params: Vec<(Matrix, Vector)>,
) -> Result<Program<S, A>>
where
    S: Member<Dense, I>,
{
    let expected = params.len();
    let mut innermost_first = params.into_iter().rev();
    let mut failure = None;
    let mut seen = 0;
    let rebuilt = eval(
        |node: S::Of<Program<S, A>>| {
            let Some(layer) = S::project_ref(&node) else {
                return Program::step(node);
            };
            seen += 1;
            match innermost_first.next() {
                Some((w, b))
                    if w.dims() == layer.weights.dims() && b.len() == layer.biases.len() =>
                {
                    let prev = S::project(node)
                        .map(|d| d.prev)
                        .expect("projection just succeeded");
                    Program::step(S::inject(DenseLayer {
                        weights: w,
                        biases: b,
                        prev,
                    }))
                }
                Some((w, _)) => {
                    failure.get_or_insert(Error::dims(
                        "with_dense_parameters",
                        format!("{:?}", layer.weights.dims()),
                        format!("{:?}", w.dims()),
                    ));
                    Program::step(node)
                }
                None => Program::step(node),
            }
        },
        Program::pure,
        network,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if seen != expected {
        return Err(Error::dims(
            "with_dense_parameters",
            format!("{seen} dense layers"),
            expected,
        ));
    }
    Ok(rebuilt)
}

/// The 1 → 3 → 3 → 3 → 1 network used for the sine experiment.
pub fn fc_network(rng: &mut SplitMix64, init: InitRange) -> Result<Network<FullyConnected>> {
    dense_network::<FullyConnected, _, _>(&[1, 3, 3, 3, 1], rng, init)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursion::{eval_ref, Coproduct};

    fn layer_dims(net: &Network<FullyConnected>) -> Vec<(usize, usize)> {
        eval_ref(
            |node: Coproduct<InputLayer<Vec<(usize, usize)>>, DenseLayer<Vec<(usize, usize)>>>| {
                match node {
                    Coproduct::Left(_) => Vec::new(),
                    Coproduct::Right(d) => {
                        let mut v = vec![d.weights.dims()];
                        v.extend(d.prev);
                        v
                    }
                }
            },
            |_| Vec::new(),
            net,
        )
    }

    #[test]
    fn fc_network_dimensions() {
        let net = fc_network(&mut SplitMix64::new(1), InitRange::default()).unwrap();
        assert_eq!(layer_dims(&net), vec![(1, 3), (3, 3), (3, 3), (3, 1)]);
        assert_eq!(net.depth(), 5);
    }

    #[test]
    fn first_draws_go_to_the_outermost_layer() {
        let net = fc_network(&mut SplitMix64::new(9), InitRange::default()).unwrap();
        let mut rng = SplitMix64::new(9);
        let first: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
        let crate::recursion::ProgramNode::Step(Coproduct::Right(top)) = net.view() else {
            panic!("expected a dense layer on top");
        };
        assert_eq!(top.weights.as_slice(), &first[..3]);
        assert_eq!(*top.biases, first[3..]);
    }

    #[test]
    fn parameters_round_trip() {
        let net = fc_network(&mut SplitMix64::new(2), InitRange::default()).unwrap();
        let params = dense_parameters(&net);
        assert_eq!(params.len(), 4);
        assert_eq!(params[0].0.dims(), (1, 3));
        let mut shifted = params.clone();
        shifted[1].1 = Vector::zeros(3);
        let rebuilt = with_dense_parameters(net.clone(), shifted.clone()).unwrap();
        assert_eq!(dense_parameters(&rebuilt), shifted);
        assert_eq!(with_dense_parameters(rebuilt, params).unwrap(), net);
    }

    #[test]
    fn replacing_parameters_checks_dims() {
        let net = fc_network(&mut SplitMix64::new(2), InitRange::default()).unwrap();
        let mut params = dense_parameters(&net);
        params[0].0 = Matrix::identity(3);
        assert!(with_dense_parameters(net.clone(), params.clone()).is_err());
        params.pop();
        assert!(with_dense_parameters(net, params).is_err());
    }

    #[test]
    fn denselayer_rejects_bias_mismatch() {
        let w = Matrix::identity(2);
        let b = Vector::new(vec![0.0]).unwrap();
        assert!(denselayer::<FullyConnected, _>(w, b).is_err());
    }

    #[test]
    fn forward_of_identity_layer() {
        let w = Matrix::identity(2);
        let b = Vector::new(vec![0.0, 0.0]).unwrap();
        let x = Vector::new(vec![0.0, 1.0]).unwrap();
        let y = dense_forward(&w, &b, &x, ZipMode::Strict).unwrap();
        assert_eq!(y[0], 0.5);
        assert_eq!(y[1], 1.0 / (1.0 + (-1.0f64).exp()));
    }
}

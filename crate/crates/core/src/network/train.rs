use super::algebra::{
    BackwardAlgebra, BackwardCoalgebra, BackwardPass, ForwardAlgebra, ForwardPass,
};
use super::layers::{inputlayer, Input, InputLayer};
use super::{BackProp, Signal, TrainConfig};
use crate::error::Result;
use crate::linalg::{vec_sub, Vector, ZipMode};
use crate::recursion::{
    eval, eval_ref, fold_ref, pair_algebra, pair_generator, try_build, try_unfold, Fixpoint,
    Member, Program, ProgramNode, DEFAULT_DEPTH_LIMIT,
};

/// `(input, desired output)`.
pub type Sample<X = Vector> = (X, Vector);

pub fn forward_algebra<S, X>(zip: ZipMode) -> impl FnMut(S::Of<ForwardPass<X>>) -> ForwardPass<X>
where
    S: ForwardAlgebra<X>,
    X: Signal,
{
    move |layer| S::forward_layer(layer, zip)
}

/// `Pure` leaves start the activation stack with the input itself.
pub fn forward_generator<A, X: Signal>() -> impl FnMut(A) -> ForwardPass<X> {
    |_| Box::new(|x| Ok(vec![x]))
}

/// All activations, newest first; the last entry is `input`.
pub fn forward<S, A, X>(network: &Program<S, A>, input: X, zip: ZipMode) -> Result<Vec<X>>
where
    S: ForwardAlgebra<X>,
    X: Signal,
{
    let mut gen = forward_generator::<(), X>();
    let pass = eval_ref(forward_algebra::<S, X>(zip), |_: &A| gen(()), network);
    pass(input)
}

pub fn forward_fixpoint<S, X>(network: &Fixpoint<S>, input: X, zip: ZipMode) -> Result<Vec<X>>
where
    S: ForwardAlgebra<X>,
    X: Signal,
{
    fold_ref(forward_algebra::<S, X>(zip), network)(input)
}

pub fn backward_algebra<S, A, X>(
    cfg: TrainConfig,
) -> impl FnMut(S::Of<BackwardPass<Program<S, A>, X>>) -> BackwardPass<Program<S, A>, X>
where
    S: BackwardAlgebra<X>,
    A: 'static,
    X: Signal,
{
    move |layer| {
        let k = S::backward_layer(layer, cfg);
        Box::new(move |bp| k(bp).map(Program::step))
    }
}

/// `Pure` leaves become an input layer, whatever the record says.
pub fn backward_generator<S, I, A, X>() -> impl FnMut(A) -> BackwardPass<Program<S, A>, X>
where
    S: Member<Input, I> + 'static,
    A: 'static,
    X: Signal,
{
    |_| Box::new(|_| Ok(inputlayer::<S, I, A>()))
}

pub fn backward_coalgebra<S, I, A, X>(
    state: (Program<S, A>, BackProp<X>),
    cfg: &TrainConfig,
) -> Result<S::Of<(Program<S, A>, BackProp<X>)>>
where
    S: BackwardCoalgebra<X> + Member<Input, I>,
    X: Signal,
{
    let (network, bp) = state;
    match network.into_view() {
        ProgramNode::Step(layer) => S::backward_step(layer, bp, cfg),
        ProgramNode::Pure(_) => Ok(S::inject(InputLayer::new())),
    }
}

/// One update as a forward fold, the record built from its output, and a
/// backward unfold.
pub fn train_meta<S, I, A, X>(
    sample: &Sample<X>,
    network: Program<S, A>,
    cfg: &TrainConfig,
) -> Result<Program<S, A>>
where
    S: ForwardAlgebra<X> + BackwardCoalgebra<X> + Member<Input, I>,
    X: Signal,
{
    cfg.validate()?;
    let (input, desired) = sample;
    let outputs = forward(&network, input.clone(), cfg.zip_mode)?;
    let seed = (network, BackProp::new(outputs, desired.clone()));
    try_build(
        |state| backward_coalgebra::<S, I, A, X>(state, cfg),
        seed,
        DEFAULT_DEPTH_LIMIT,
    )
}

/// One update as a single fold producing both the forward and the backward
/// continuation.
pub fn train_fold<S, I, A, X>(
    sample: &Sample<X>,
    network: Program<S, A>,
    cfg: &TrainConfig,
) -> Result<Program<S, A>>
where
    S: ForwardAlgebra<X> + BackwardAlgebra<X> + Member<Input, I>,
    A: Clone + 'static,
    X: Signal,
{
    cfg.validate()?;
    let (input, desired) = sample;
    let alg = pair_algebra::<S, _, _>(
        forward_algebra::<S, X>(cfg.zip_mode),
        backward_algebra::<S, A, X>(*cfg),
    );
    let gen = pair_generator(
        forward_generator::<A, X>(),
        backward_generator::<S, I, A, X>(),
    );
    let (forward_pass, backward_pass) = eval(alg, gen, network);
    let outputs = forward_pass(input.clone())?;
    backward_pass(BackProp::new(outputs, desired.clone()))
}

/// A right fold of [`train_fold`] over `dataset`: the last sample is applied
/// first and the first sample last.
pub fn train_many<S, I, A, X>(
    dataset: &[Sample<X>],
    network: Program<S, A>,
    cfg: &TrainConfig,
) -> Result<Program<S, A>>
where
    S: ForwardAlgebra<X> + BackwardAlgebra<X> + Member<Input, I>,
    A: Clone + 'static,
    X: Signal,
{
    dataset.iter().rev().try_fold(network, |network, sample| {
        train_fold::<S, I, A, X>(sample, network, cfg)
    })
}

/// [`train_meta`] over a closed network.
pub fn train_meta_fixpoint<S, X>(
    sample: &Sample<X>,
    network: Fixpoint<S>,
    cfg: &TrainConfig,
) -> Result<Fixpoint<S>>
where
    S: ForwardAlgebra<X> + BackwardCoalgebra<X>,
    X: Signal,
{
    cfg.validate()?;
    let (input, desired) = sample;
    let outputs = forward_fixpoint(&network, input.clone(), cfg.zip_mode)?;
    try_unfold(
        |(network, bp): (Fixpoint<S>, BackProp<X>)| S::backward_step(network.unwrap(), bp, cfg),
        (network, BackProp::new(outputs, desired.clone())),
        DEFAULT_DEPTH_LIMIT,
    )
}

/// `‖output − desired‖₂`, over the common prefix if the lengths differ.
pub fn output_error<X: Signal>(output: &X, desired: &Vector) -> f64 {
    vec_sub(output.values(), desired, ZipMode::Truncate)
        .map(|d| d.norm())
        .unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::linalg::Matrix;
    use crate::network::layers::{dense_network, denselayer, fc_network, FullyConnected, Network};
    use crate::network::InitRange;
    use crate::rng::SplitMix64;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn input_only() -> Network<FullyConnected> {
        inputlayer::<FullyConnected, _, ()>()
    }

    #[test]
    fn input_layer_forward_is_singleton() {
        let out = forward(&input_only(), v(&[1.0, 2.0]), ZipMode::Strict).unwrap();
        assert_eq!(out, vec![v(&[1.0, 2.0])]);
    }

    #[test]
    fn two_layer_identity_forward() {
        let net = denselayer::<FullyConnected, _>(Matrix::identity(2), Vector::zeros(2))
            .unwrap()
            .then(input_only());
        let out = forward(&net, v(&[0.0, 0.0]), ZipMode::Strict).unwrap();
        assert_eq!(out, vec![v(&[0.5, 0.5]), v(&[0.0, 0.0])]);
    }

    #[test]
    fn stack_length_is_depth() {
        let net = fc_network(&mut SplitMix64::new(3), InitRange::default()).unwrap();
        let out = forward(&net, v(&[0.4]), ZipMode::Strict).unwrap();
        assert_eq!(out.len(), net.depth());
        assert_eq!(out.last(), Some(&v(&[0.4])));
    }

    #[test]
    fn strict_forward_rejects_wrong_input() {
        let net = fc_network(&mut SplitMix64::new(3), InitRange::default()).unwrap();
        assert!(matches!(
            forward(&net, v(&[0.4, 0.1]), ZipMode::Strict),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn paths_agree_on_the_sine_network() {
        let net = fc_network(&mut SplitMix64::new(11), InitRange::default()).unwrap();
        let sample = (v(&[0.3]), v(&[0.8]));
        let cfg = TrainConfig::standard(0.1);
        let a = train_meta(&sample, net.clone(), &cfg).unwrap();
        let b = train_fold(&sample, net.clone(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, net);
        assert_eq!(a.depth(), net.depth());
    }

    #[test]
    fn fixpoint_path_agrees_with_program_path() {
        let net = dense_network::<FullyConnected, _, _>(
            &[2, 3, 2],
            &mut SplitMix64::new(5),
            InitRange::default(),
        )
        .unwrap();
        let fix = net.clone().into_fixpoint().unwrap();
        let sample = (v(&[0.1, 0.9]), v(&[1.0, 0.0]));
        let cfg = TrainConfig::standard(0.5);
        let a = train_meta_fixpoint(&sample, fix, &cfg).unwrap();
        let b = train_meta(&sample, net, &cfg).unwrap();
        assert_eq!(Program::from_fixpoint(a), b);
    }

    #[test]
    fn pure_leaf_trains_like_an_input_layer() {
        let open = denselayer::<FullyConnected, _>(Matrix::identity(1), Vector::zeros(1)).unwrap();
        let closed = open.clone().then(input_only());
        let sample = (v(&[0.2]), v(&[0.9]));
        let cfg = TrainConfig::default();
        let from_open = train_fold(&sample, open, &cfg).unwrap();
        assert_eq!(from_open, train_fold(&sample, closed, &cfg).unwrap());
    }

    #[test]
    fn zero_error_sample_leaves_network_unchanged() {
        let net = fc_network(&mut SplitMix64::new(2), InitRange::default()).unwrap();
        let out = forward(&net, v(&[0.7]), ZipMode::Strict).unwrap();
        let sample = (v(&[0.7]), out[0].clone());
        let cfg = TrainConfig::default();
        assert_eq!(train_meta(&sample, net.clone(), &cfg).unwrap(), net);
        assert_eq!(train_fold(&sample, net.clone(), &cfg).unwrap(), net);
    }

    #[test]
    fn train_many_is_a_right_fold() {
        let net = fc_network(&mut SplitMix64::new(4), InitRange::default()).unwrap();
        let s1 = (v(&[0.1]), v(&[0.2]));
        let s2 = (v(&[0.9]), v(&[0.7]));
        let cfg = TrainConfig::standard(0.1);
        let many = train_many(&[s1.clone(), s2.clone()], net.clone(), &cfg).unwrap();
        let manual = train_fold(&s1, train_fold(&s2, net.clone(), &cfg).unwrap(), &cfg).unwrap();
        assert_eq!(many, manual);
        let empty: &[Sample] = &[];
        assert_eq!(train_many(empty, net.clone(), &cfg).unwrap(), net);
    }

    #[test]
    fn non_positive_learning_rate_is_rejected() {
        let net = fc_network(&mut SplitMix64::new(4), InitRange::default()).unwrap();
        let cfg = TrainConfig::standard(0.0);
        assert!(matches!(
            train_fold(&(v(&[0.1]), v(&[0.2])), net, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn output_error_is_l2() {
        assert_eq!(output_error(&v(&[3.0, 0.0]), &v(&[0.0, 4.0])), 5.0);
    }
}

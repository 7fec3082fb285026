use super::{Signal, TrainConfig};
use crate::error::{Error, Result};
use crate::linalg::{
    mat_sub, mat_vec, outer, sigmoid_prime, transpose, vec_mul, vec_sub, BackpropMode, Matrix,
    Vector, ZipMode,
};

/// What the layer after the current one passes back.
#[derive(Debug, Clone, PartialEq)]
pub enum NextLayer {
    /// The current layer is the output layer.
    Absent,
    /// A dense successor: its pre-update weights `w_{l+1}` and delta `δ_{l+1}`.
    Dense { weights: Matrix, delta: Vector },
    /// Any other successor: the loss gradient with respect to this layer's output.
    Gradient(Vector),
}

/// State threaded backwards through the network during backpropagation.
#[derive(Debug, Clone, PartialEq)]
pub struct BackProp<X = Vector> {
    /// Forward activations, newest first. The head is the output of the
    /// layer being updated, the next entry its input.
    pub outputs: Vec<X>,
    pub next: NextLayer,
    pub desired: Vector,
}

impl<X: Signal> BackProp<X> {
    /// The initial record for the output layer.
    pub fn new(outputs: Vec<X>, desired: Vector) -> Self {
        BackProp {
            outputs,
            next: NextLayer::Absent,
            desired,
        }
    }

    pub fn next_weights(&self) -> Option<&Matrix> {
        match &self.next {
            NextLayer::Dense { weights, .. } => Some(weights),
            _ => None,
        }
    }

    pub fn next_delta(&self) -> Option<&Vector> {
        match &self.next {
            NextLayer::Dense { delta, .. } => Some(delta),
            _ => None,
        }
    }

    /// `(a_l, a_{l-1})`.
    pub fn current(&self) -> Result<(&X, &X)> {
        match self.outputs.as_slice() {
            [output, input, ..] => Ok((output, input)),
            _ => Err(Error::MalformedStack),
        }
    }

    /// Loss gradient with respect to the current layer's output, before the
    /// activation derivative is applied.
    pub fn upstream(&self, zip: ZipMode) -> Result<Vector> {
        let (output, _) = self.current()?;
        match &self.next {
            NextLayer::Absent => vec_sub(output.values(), &self.desired, zip),
            NextLayer::Dense { weights, delta } => mat_vec(&transpose(weights), delta, zip),
            NextLayer::Gradient(g) => Ok(g.clone()),
        }
    }

    /// The record handed to the previous layer: drops the head of the
    /// activation stack and replaces what the next layer passed back.
    pub fn thread(mut self, next: NextLayer) -> Self {
        if !self.outputs.is_empty() {
            self.outputs.remove(0);
        }
        self.next = next;
        self
    }
}

/// Delta and updated parameters for one dense layer.
///
/// Standard mode is ordinary gradient descent on `½‖a_L − y‖²`:
/// `δ_l = upstream ⊙ a_l(1 − a_l)`, `w ← w − η δ_l a_{l−1}ᵀ`, `b ← b − η δ_l`,
/// with every dimension checked. Verbatim mode applies the logit-based
/// derivative to `a_{l−1}`, builds `a_{l−1} ⊛ δ_l` and truncates every zip,
/// so non-square layers shrink.
pub fn backward<X: Signal>(
    weights: &Matrix,
    biases: &Vector,
    bp: &BackProp<X>,
    cfg: &TrainConfig,
) -> Result<(Vector, Matrix, Vector)> {
    let (output, input) = bp.current()?;
    let (output, input) = (output.values(), input.values());
    let eta = cfg.learning_rate;
    match cfg.backprop_mode {
        BackpropMode::PaperVerbatim => {
            let zip = ZipMode::Truncate;
            let upstream = bp.upstream(zip)?;
            let delta = vec_mul(
                &upstream,
                &sigmoid_prime(input, BackpropMode::PaperVerbatim)?,
                zip,
            )?;
            let step = outer(input, &delta)?;
            let weights = mat_sub(weights, &step.scale(eta), zip)?;
            let biases = vec_sub(biases, &delta.scale(eta), zip)?;
            Ok((delta, weights, biases))
        }
        BackpropMode::Standard => {
            let zip = ZipMode::Strict;
            let upstream = bp.upstream(zip)?;
            let delta = vec_mul(
                &upstream,
                &sigmoid_prime(output, BackpropMode::Standard)?,
                zip,
            )?;
            let step = outer(&delta, input)?;
            let weights = mat_sub(weights, &step.scale(eta), zip)?;
            let biases = vec_sub(biases, &delta.scale(eta), zip)?;
            Ok((delta, weights, biases))
        }
    }
}

/// One dense backpropagation step shared by the unfold and fold paths.
pub(crate) fn dense_update<X: Signal>(
    weights: &Matrix,
    biases: &Vector,
    bp: BackProp<X>,
    cfg: &TrainConfig,
) -> Result<(Matrix, Vector, BackProp<X>)> {
    let (delta, new_weights, new_biases) = backward(weights, biases, &bp, cfg)?;
    let threaded = bp.thread(NextLayer::Dense {
        weights: weights.clone(),
        delta,
    });
    Ok((new_weights, new_biases, threaded))
}

//! Finite-difference checks of backpropagation against the forward loss
//! `½‖a_L − y‖²`.
//!
//! Each check returns the largest [`relative_error`] between the analytic
//! gradient and the central difference `(L(p + h) − L(p − h)) / 2h`.

use crate::conv::{
    conv_forward, conv_gradients, pool_backward, pool_forward, relu_backward, relu_forward,
    FilterBank, Tensor3,
};
use crate::error::Result;
use crate::network::{
    forward, train_fold, BackwardAlgebra, ForwardAlgebra, Input, Network, Sample, Signal,
    TrainConfig,
};
use crate::persist::{decode_layers, encode_layers, LayerRecord, Persist};
use crate::recursion::Member;
use crate::ZipMode;

/// `|a − b| / max(|a|, |b|, 1e-6)`. The floor keeps gradients that vanish
/// to rounding noise from reading as large relative errors.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

pub fn half_squared_error(output: &[f64], desired: &[f64]) -> f64 {
    output
        .iter()
        .zip(desired)
        .map(|(a, y)| 0.5 * (a - y) * (a - y))
        .sum()
}

pub fn central_difference(params: &[f64], step: f64, loss: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut p = params.to_vec();
    (0..params.len())
        .map(|i| {
            p[i] = params[i] + step;
            let up = loss(&p);
            p[i] = params[i] - step;
            let down = loss(&p);
            p[i] = params[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max)
}

/// Every trainable parameter of a network, in document order.
pub fn flatten_parameters(records: &[LayerRecord]) -> Vec<f64> {
    let mut out = Vec::new();
    for r in records {
        match r {
            LayerRecord::Dense { weights, biases } => {
                out.extend(weights.iter().flatten());
                out.extend(biases);
            }
            LayerRecord::Conv {
                weights, biases, ..
            } => {
                out.extend(weights);
                out.extend(biases);
            }
            LayerRecord::Input | LayerRecord::Pool { .. } | LayerRecord::Relu => {}
        }
    }
    out
}

/// Inverse of [`flatten_parameters`] against the records' shapes.
pub fn with_parameters(records: &[LayerRecord], params: &[f64]) -> Vec<LayerRecord> {
    let mut it = params.iter().copied();
    let mut take = |n: usize| -> Vec<f64> { (&mut it).take(n).collect() };
    records
        .iter()
        .map(|r| match r {
            LayerRecord::Dense { weights, biases } => LayerRecord::Dense {
                weights: weights.iter().map(|row| take(row.len())).collect(),
                biases: take(biases.len()),
            },
            LayerRecord::Conv {
                filter_w,
                filter_h,
                in_depth,
                n_filters,
                weights,
                biases,
            } => LayerRecord::Conv {
                filter_w: *filter_w,
                filter_h: *filter_h,
                in_depth: *in_depth,
                n_filters: *n_filters,
                weights: take(weights.len()),
                biases: take(biases.len()),
            },
            other => other.clone(),
        })
        .collect()
}

/// One standard-mode training step with `η = 1` against the numeric
/// gradient over every parameter of the network.
pub fn network_update_error<S, I, X>(
    network: &Network<S>,
    sample: &Sample<X>,
    step: f64,
) -> Result<f64>
where
    S: Persist + ForwardAlgebra<X> + BackwardAlgebra<X> + Member<Input, I>,
    X: Signal,
{
    let (input, desired) = sample;
    let records = encode_layers(network)?;
    let params = flatten_parameters(&records);
    let loss = |p: &[f64]| -> f64 {
        let perturbed = decode_layers::<S>(&with_parameters(&records, p))
            .expect("perturbing keeps the layout valid");
        match forward(&perturbed, input.clone(), ZipMode::Strict) {
            Ok(out) => half_squared_error(out[0].values(), desired),
            Err(_) => f64::NAN,
        }
    };
    let numeric = central_difference(&params, step, loss);
    let trained = train_fold::<S, I, (), X>(sample, network.clone(), &TrainConfig::standard(1.0))?;
    let updated = flatten_parameters(&encode_layers(&trained)?);
    let analytic: Vec<f64> = params.iter().zip(&updated).map(|(p, u)| p - u).collect();
    Ok(max_relative_error(&analytic, &numeric))
}

fn residual(output: &Tensor3, desired: &[f64]) -> Result<Tensor3> {
    let (w, h, d) = output.dims();
    Tensor3::new(
        w,
        h,
        d,
        output
            .as_slice()
            .iter()
            .zip(desired)
            .map(|(a, y)| a - y)
            .collect(),
    )
}

/// Weight, bias and input gradients of one convolution.
pub fn conv_error(bank: &FilterBank, input: &Tensor3, desired: &[f64], step: f64) -> Result<f64> {
    let grads = conv_gradients(
        bank,
        input,
        &residual(&conv_forward(bank, input)?, desired)?,
    )?;
    let (fw, fh, fd, nf) = (
        bank.filter_w(),
        bank.filter_h(),
        bank.in_depth(),
        bank.n_filters(),
    );
    let (w, h, d) = input.dims();
    let by_weights = central_difference(bank.weights(), step, |p| {
        let b = FilterBank::new(fw, fh, fd, nf, p.to_vec(), bank.biases().to_vec())
            .expect("same layout");
        half_squared_error(
            conv_forward(&b, input).expect("same dims").as_slice(),
            desired,
        )
    });
    let by_biases = central_difference(bank.biases(), step, |p| {
        let b = FilterBank::new(fw, fh, fd, nf, bank.weights().to_vec(), p.to_vec())
            .expect("same layout");
        half_squared_error(
            conv_forward(&b, input).expect("same dims").as_slice(),
            desired,
        )
    });
    let by_input = central_difference(input.as_slice(), step, |p| {
        let x = Tensor3::new(w, h, d, p.to_vec()).expect("same layout");
        half_squared_error(
            conv_forward(bank, &x).expect("same dims").as_slice(),
            desired,
        )
    });
    Ok(max_relative_error(&grads.weights, &by_weights)
        .max(max_relative_error(&grads.biases, &by_biases))
        .max(max_relative_error(grads.input.as_slice(), &by_input)))
}

pub fn pool_error(
    window: usize,
    stride: usize,
    input: &Tensor3,
    desired: &[f64],
    step: f64,
) -> Result<f64> {
    let (out, argmax) = pool_forward(window, stride, input)?;
    let grad = pool_backward(&argmax, &residual(&out, desired)?)?;
    let (w, h, d) = input.dims();
    let numeric = central_difference(input.as_slice(), step, |p| {
        let x = Tensor3::new(w, h, d, p.to_vec()).expect("same layout");
        half_squared_error(
            pool_forward(window, stride, &x)
                .expect("same dims")
                .0
                .as_slice(),
            desired,
        )
    });
    Ok(max_relative_error(grad.as_slice(), &numeric))
}

/// Inputs within `step` of zero straddle the kink and are not meaningful.
pub fn relu_error(input: &Tensor3, desired: &[f64], step: f64) -> Result<f64> {
    let grad = relu_backward(input, &residual(&relu_forward(input), desired)?)?;
    let (w, h, d) = input.dims();
    let numeric = central_difference(input.as_slice(), step, |p| {
        let x = Tensor3::new(w, h, d, p.to_vec()).expect("same layout");
        half_squared_error(relu_forward(&x).as_slice(), desired)
    });
    Ok(max_relative_error(grad.as_slice(), &numeric))
}

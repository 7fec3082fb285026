use super::tensor::{FilterBank, Tensor3};
use crate::error::{Error, Result};

/// Parameter and input gradients of a convolution for a given upstream
/// gradient, in the storage order of [`FilterBank`] and [`Tensor3`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvGradients {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub input: Tensor3,
}

/// For each pooled output cell, the flat input index that won the max.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgmaxMap {
    pub input_dims: (usize, usize, usize),
    pub output_dims: (usize, usize, usize),
    pub indices: Vec<usize>,
}

pub fn conv_output_dims(bank: &FilterBank, input: &Tensor3) -> Result<(usize, usize, usize)> {
    let (w, h, d) = input.dims();
    if d != bank.in_depth() {
        return Err(Error::dims(
            "conv_forward",
            format!("input depth {}", bank.in_depth()),
            d,
        ));
    }
    if bank.filter_w() > w || bank.filter_h() > h {
        return Err(Error::dims(
            "conv_forward",
            format!("input of at least {}x{}", bank.filter_w(), bank.filter_h()),
            format!("{w}x{h}"),
        ));
    }
    Ok((
        w - bank.filter_w() + 1,
        h - bank.filter_h() + 1,
        bank.n_filters(),
    ))
}

/// Valid cross-correlation with stride 1:
/// `out[x, y, f] = b_f + Σ_{d, j, i} w[f][d][j][i] · in[x + i, y + j, d]`.
pub fn conv_forward(bank: &FilterBank, input: &Tensor3) -> Result<Tensor3> {
    let (ow, oh, of) = conv_output_dims(bank, input)?;
    let mut out = Vec::with_capacity(ow * oh * of);
    for f in 0..of {
        for y in 0..oh {
            for x in 0..ow {
                let mut acc = bank.biases()[f];
                for d in 0..bank.in_depth() {
                    for j in 0..bank.filter_h() {
                        for i in 0..bank.filter_w() {
                            acc += bank.weight(f, d, j, i) * input.get(x + i, y + j, d);
                        }
                    }
                }
                out.push(acc);
            }
        }
    }
    Ok(Tensor3::from_raw(ow, oh, of, out))
}

pub fn conv_gradients(
    bank: &FilterBank,
    input: &Tensor3,
    upstream: &Tensor3,
) -> Result<ConvGradients> {
    let out_dims = conv_output_dims(bank, input)?;
    if upstream.dims() != out_dims {
        return Err(Error::dims(
            "conv_backward",
            format!("{out_dims:?}"),
            format!("{:?}", upstream.dims()),
        ));
    }
    let (ow, oh, of) = out_dims;
    let mut weights = vec![0.0; bank.weights().len()];
    let mut biases = vec![0.0; of];
    let (iw, ih, id) = input.dims();
    let mut input_grad = vec![0.0; iw * ih * id];
    for f in 0..of {
        for y in 0..oh {
            for x in 0..ow {
                let g = upstream.get(x, y, f);
                biases[f] += g;
                for d in 0..id {
                    for j in 0..bank.filter_h() {
                        for i in 0..bank.filter_w() {
                            weights[bank.weight_index(f, d, j, i)] +=
                                g * input.get(x + i, y + j, d);
                            input_grad[input.index(x + i, y + j, d)] += g * bank.weight(f, d, j, i);
                        }
                    }
                }
            }
        }
    }
    Ok(ConvGradients {
        weights,
        biases,
        input: Tensor3::from_raw(iw, ih, id, input_grad),
    })
}

/// Gradient step on the bank and the gradient with respect to the input.
pub fn conv_backward(
    bank: &FilterBank,
    cached_input: &Tensor3,
    upstream: &Tensor3,
    learning_rate: f64,
) -> Result<(FilterBank, Tensor3)> {
    let grads = conv_gradients(bank, cached_input, upstream)?;
    let step = |p: &[f64], g: &[f64]| -> Vec<f64> {
        p.iter()
            .zip(g)
            .map(|(p, g)| p - learning_rate * g)
            .collect()
    };
    let updated = bank.with_parameters(
        step(bank.weights(), &grads.weights),
        step(bank.biases(), &grads.biases),
    );
    Ok((updated, grads.input))
}

pub fn pool_output_dims(
    window: usize,
    stride: usize,
    input: &Tensor3,
) -> Result<(usize, usize, usize)> {
    if window == 0 || stride == 0 {
        return Err(Error::InvalidConfig(format!(
            "pool window and stride must be positive, got {window} and {stride}"
        )));
    }
    let (w, h, d) = input.dims();
    if window > w || window > h {
        return Err(Error::dims(
            "pool_forward",
            format!("input of at least {window}x{window}"),
            format!("{w}x{h}"),
        ));
    }
    Ok(((w - window) / stride + 1, (h - window) / stride + 1, d))
}

/// Per-channel sliding max. Ties go to the first cell in row-major order
/// within the window.
pub fn pool_forward(window: usize, stride: usize, input: &Tensor3) -> Result<(Tensor3, ArgmaxMap)> {
    let (ow, oh, od) = pool_output_dims(window, stride, input)?;
    let mut out = Vec::with_capacity(ow * oh * od);
    let mut indices = Vec::with_capacity(ow * oh * od);
    for d in 0..od {
        for y in 0..oh {
            for x in 0..ow {
                let mut best = input.index(x * stride, y * stride, d);
                for j in 0..window {
                    for i in 0..window {
                        let k = input.index(x * stride + i, y * stride + j, d);
                        if input.as_slice()[k] > input.as_slice()[best] {
                            best = k;
                        }
                    }
                }
                out.push(input.as_slice()[best]);
                indices.push(best);
            }
        }
    }
    let map = ArgmaxMap {
        input_dims: input.dims(),
        output_dims: (ow, oh, od),
        indices,
    };
    Ok((Tensor3::from_raw(ow, oh, od, out), map))
}

/// Routes each upstream entry to its argmax cell; overlapping windows sum.
pub fn pool_backward(argmax: &ArgmaxMap, upstream: &Tensor3) -> Result<Tensor3> {
    if upstream.dims() != argmax.output_dims {
        return Err(Error::dims(
            "pool_backward",
            format!("{:?}", argmax.output_dims),
            format!("{:?}", upstream.dims()),
        ));
    }
    let (w, h, d) = argmax.input_dims;
    let mut grad = vec![0.0; w * h * d];
    for (&k, &g) in argmax.indices.iter().zip(upstream.as_slice()) {
        grad[k] += g;
    }
    Ok(Tensor3::from_raw(w, h, d, grad))
}

pub fn relu_forward(input: &Tensor3) -> Tensor3 {
    input.map(|v| v.max(0.0))
}

/// Passes the gradient where the input is strictly positive.
pub fn relu_backward(cached_input: &Tensor3, upstream: &Tensor3) -> Result<Tensor3> {
    if cached_input.dims() != upstream.dims() {
        return Err(Error::dims(
            "relu_backward",
            format!("{:?}", cached_input.dims()),
            format!("{:?}", upstream.dims()),
        ));
    }
    let values = cached_input
        .as_slice()
        .iter()
        .zip(upstream.as_slice())
        .map(|(&x, &g)| if x > 0.0 { g } else { 0.0 })
        .collect();
    let (w, h, d) = cached_input.dims();
    Ok(Tensor3::from_raw(w, h, d, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::InitRange;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn random_tensor(w: usize, h: usize, d: usize, rng: &mut SplitMix64) -> Tensor3 {
        Tensor3::new(
            w,
            h,
            d,
            (0..w * h * d).map(|_| rng.uniform(-1.0, 1.0)).collect(),
        )
        .unwrap()
    }

    fn random_bank(fw: usize, fh: usize, d: usize, nf: usize, rng: &mut SplitMix64) -> FilterBank {
        let weights = (0..fw * fh * d * nf)
            .map(|_| rng.uniform(-1.0, 1.0))
            .collect();
        let biases = (0..nf).map(|_| rng.uniform(-1.0, 1.0)).collect();
        FilterBank::new(fw, fh, d, nf, weights, biases).unwrap()
    }

    #[test]
    fn unit_filter_is_identity() {
        let bank = FilterBank::new(1, 1, 1, 1, vec![1.0], vec![0.0]).unwrap();
        let x = random_tensor(4, 3, 1, &mut SplitMix64::new(1));
        assert_eq!(conv_forward(&bank, &x).unwrap(), x);
    }

    #[test]
    fn zero_input_gives_biases() {
        let mut rng = SplitMix64::new(2);
        let bank = random_bank(2, 2, 2, 3, &mut rng);
        let out = conv_forward(&bank, &Tensor3::zeros(4, 4, 2)).unwrap();
        assert_eq!(out.dims(), (3, 3, 3));
        for f in 0..3 {
            for y in 0..3 {
                for x in 0..3 {
                    assert_eq!(out.get(x, y, f), bank.biases()[f]);
                }
            }
        }
    }

    #[test]
    fn conv_matches_loop_oracle() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            let input = random_tensor(3, 3, 1, &mut rng);
            let bank = random_bank(2, 2, 1, 1, &mut rng);
            let out = conv_forward(&bank, &input).unwrap();
            let w = bank.weights();
            let x = input.as_slice();
            for oy in 0..2 {
                for ox in 0..2 {
                    let mut acc = bank.biases()[0];
                    for j in 0..2 {
                        for i in 0..2 {
                            acc += w[j * 2 + i] * x[(oy + j) * 3 + ox + i];
                        }
                    }
                    assert_eq!(out.as_slice()[oy * 2 + ox], acc);
                }
            }
        }
    }

    #[test]
    fn conv_rejects_bad_shapes() {
        let bank =
            FilterBank::random(3, 3, 2, 1, &mut SplitMix64::new(0), InitRange::default()).unwrap();
        assert!(conv_forward(&bank, &Tensor3::zeros(4, 4, 1)).is_err());
        assert!(conv_forward(&bank, &Tensor3::zeros(2, 4, 2)).is_err());
    }

    #[test]
    fn zero_upstream_leaves_bank_unchanged() {
        let mut rng = SplitMix64::new(4);
        let bank = random_bank(2, 2, 1, 2, &mut rng);
        let x = random_tensor(3, 3, 1, &mut rng);
        let (updated, grad) = conv_backward(&bank, &x, &Tensor3::zeros(2, 2, 2), 0.5).unwrap();
        assert_eq!(updated, bank);
        assert!(grad.as_slice().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn unit_filter_update_is_an_outer_product() {
        // A 1x1 filter on a 1x1xd input is a dense layer with weights f x d.
        let bank = FilterBank::new(
            1,
            1,
            3,
            2,
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6],
            vec![0.0, 0.0],
        )
        .unwrap();
        let x = Tensor3::new(1, 1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let g = Tensor3::new(1, 1, 2, vec![0.5, -1.0]).unwrap();
        let grads = conv_gradients(&bank, &x, &g).unwrap();
        assert_eq!(grads.weights, vec![0.5, 1.0, 1.5, -1.0, -2.0, -3.0]);
        assert_eq!(grads.biases, vec![0.5, -1.0]);
        assert_eq!(
            grads.input.as_slice(),
            &[0.1 * 0.5 - 0.4, 0.2 * 0.5 - 0.5, 0.3 * 0.5 - 0.6]
        );
    }

    #[test]
    fn global_pool_is_channel_max() {
        let x = Tensor3::new(2, 2, 2, vec![1.0, 4.0, 3.0, 2.0, -1.0, -5.0, -2.0, -3.0]).unwrap();
        let (out, map) = pool_forward(2, 1, &x).unwrap();
        assert_eq!(out.as_slice(), &[4.0, -1.0]);
        assert_eq!(map.indices, vec![1, 4]);
    }

    #[test]
    fn constant_input_picks_window_origin() {
        let x = Tensor3::new(3, 3, 1, vec![2.0; 9]).unwrap();
        let (out, map) = pool_forward(2, 1, &x).unwrap();
        assert_eq!(out.as_slice(), &[2.0; 4]);
        assert_eq!(map.indices, vec![0, 1, 3, 4]);
    }

    #[test]
    fn pool_five_by_five() {
        let (out, _) = pool_forward(2, 1, &Tensor3::zeros(5, 5, 4)).unwrap();
        assert_eq!(out.dims(), (4, 4, 4));
    }

    #[test]
    fn pool_backward_scatters_and_sums() {
        let x = Tensor3::new(4, 2, 1, vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 3.0, 0.0]).unwrap();
        let (_, map) = pool_forward(2, 2, &x).unwrap();
        let g = Tensor3::new(2, 1, 1, vec![5.0, 7.0]).unwrap();
        assert_eq!(
            pool_backward(&map, &g).unwrap().as_slice(),
            &[0.0, 5.0, 0.0, 0.0, 0.0, 0.0, 7.0, 0.0]
        );

        let (_, map) = pool_forward(
            2,
            1,
            &Tensor3::new(3, 2, 1, vec![0.0, 9.0, 0.0, 0.0, 0.0, 0.0]).unwrap(),
        )
        .unwrap();
        let g = Tensor3::new(2, 1, 1, vec![1.0, 2.0]).unwrap();
        assert_eq!(pool_backward(&map, &g).unwrap().as_slice()[1], 3.0);
        assert!(pool_backward(&map, &Tensor3::zeros(2, 1, 1))
            .unwrap()
            .as_slice()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn relu_cases() {
        let neg = Tensor3::new(2, 1, 1, vec![-1.0, -0.5]).unwrap();
        assert_eq!(relu_forward(&neg).as_slice(), &[0.0, 0.0]);
        let pos = Tensor3::new(2, 1, 1, vec![1.0, 0.5]).unwrap();
        assert_eq!(relu_forward(&pos), pos);
        let zero = Tensor3::new(2, 1, 1, vec![0.0, 2.0]).unwrap();
        assert_eq!(relu_backward(&zero, &pos).unwrap().as_slice(), &[0.0, 0.5]);
    }

    proptest! {
        #[test]
        fn output_dims_follow_formulas(
            w in 1usize..8, h in 1usize..8, d in 1usize..4,
            fw in 1usize..4, fh in 1usize..4, nf in 1usize..4,
            window in 1usize..4, stride in 1usize..4,
        ) {
            let x = Tensor3::zeros(w, h, d);
            let bank = FilterBank::random(fw, fh, d, nf, &mut SplitMix64::new(0), InitRange::default()).unwrap();
            match conv_forward(&bank, &x) {
                Ok(out) => prop_assert_eq!(out.dims(), (w - fw + 1, h - fh + 1, nf)),
                Err(_) => prop_assert!(fw > w || fh > h),
            }
            match pool_forward(window, stride, &x) {
                Ok((out, _)) => prop_assert_eq!(out.dims(), ((w - window) / stride + 1, (h - window) / stride + 1, d)),
                Err(_) => prop_assert!(window > w || window > h),
            }
        }

        #[test]
        fn pool_is_deterministic(seed in any::<u64>()) {
            let x = random_tensor(5, 4, 2, &mut SplitMix64::new(seed));
            prop_assert_eq!(pool_forward(2, 1, &x).unwrap(), pool_forward(2, 1, &x).unwrap());
        }
    }
}

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::check_finite;
use crate::network::{InitRange, Signal};
use crate::rng::SplitMix64;

/// A `width × height × depth` block of reals, stored one channel plane at a
/// time, each plane row-major: index `(d * height + y) * width + x`.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    width: usize,
    height: usize,
    depth: usize,
    values: Vec<f64>,
}

impl Tensor3 {
    pub fn new(width: usize, height: usize, depth: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || depth == 0 {
            return Err(Error::EmptyOperand { op: "Tensor3::new" });
        }
        if values.len() != width * height * depth {
            return Err(Error::dims(
                "Tensor3::new",
                format!(
                    "{} values for {width}x{height}x{depth}",
                    width * height * depth
                ),
                values.len(),
            ));
        }
        check_finite("Tensor3::new", &values)?;
        Ok(Tensor3 {
            width,
            height,
            depth,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize, depth: usize) -> Self {
        Tensor3 {
            width,
            height,
            depth,
            values: vec![0.0; width * height * depth],
        }
    }

    pub(crate) fn from_raw(width: usize, height: usize, depth: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height * depth);
        Tensor3 {
            width,
            height,
            depth,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `(width, height, depth)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.depth)
    }

    pub fn index(&self, x: usize, y: usize, d: usize) -> usize {
        (d * self.height + y) * self.width + x
    }

    pub fn get(&self, x: usize, y: usize, d: usize) -> f64 {
        self.values[self.index(x, y, d)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3::from_raw(
            self.width,
            self.height,
            self.depth,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Tensor3({}x{}x{}, {:?})",
            self.width, self.height, self.depth, self.values
        )
    }
}

/// A dense layer's output seen as a tensor is a `1 × 1 × n` column, and any
/// tensor fed to a dense layer is read in storage order, which is the
/// flatten step between the convolutional and dense parts of a network.
impl Signal for Tensor3 {
    fn values(&self) -> &[f64] {
        &self.values
    }

    fn from_values(values: Vec<f64>) -> Self {
        let n = values.len();
        Tensor3::from_raw(1, 1, n, values)
    }
}

/// `n_filters` filters of size `filter_w × filter_h × in_depth`, with one
/// bias per filter. Weights are indexed `[f][d][y][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    filter_w: usize,
    filter_h: usize,
    in_depth: usize,
    n_filters: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl FilterBank {
    pub fn new(
        filter_w: usize,
        filter_h: usize,
        in_depth: usize,
        n_filters: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
    ) -> Result<Self> {
        if filter_w == 0 || filter_h == 0 || in_depth == 0 || n_filters == 0 {
            return Err(Error::EmptyOperand {
                op: "FilterBank::new",
            });
        }
        let count = filter_w * filter_h * in_depth * n_filters;
        if weights.len() != count {
            return Err(Error::dims("FilterBank::new", count, weights.len()));
        }
        if biases.len() != n_filters {
            return Err(Error::dims("FilterBank::new", n_filters, biases.len()));
        }
        check_finite("FilterBank::new", &weights)?;
        check_finite("FilterBank::new", &biases)?;
        Ok(FilterBank {
            filter_w,
            filter_h,
            in_depth,
            n_filters,
            weights,
            biases,
        })
    }

    /// Weights drawn from `init` in storage order; biases start at zero.
    pub fn random(
        filter_w: usize,
        filter_h: usize,
        in_depth: usize,
        n_filters: usize,
        rng: &mut SplitMix64,
        init: InitRange,
    ) -> Result<Self> {
        let count = filter_w * filter_h * in_depth * n_filters;
        let weights = (0..count).map(|_| rng.uniform(init.lo, init.hi)).collect();
        FilterBank::new(
            filter_w,
            filter_h,
            in_depth,
            n_filters,
            weights,
            vec![0.0; n_filters],
        )
    }

    pub fn filter_w(&self) -> usize {
        self.filter_w
    }

    pub fn filter_h(&self) -> usize {
        self.filter_h
    }

    pub fn in_depth(&self) -> usize {
        self.in_depth
    }

    pub fn n_filters(&self) -> usize {
        self.n_filters
    }

    pub fn weight_index(&self, f: usize, d: usize, y: usize, x: usize) -> usize {
        ((f * self.in_depth + d) * self.filter_h + y) * self.filter_w + x
    }

    pub fn weight(&self, f: usize, d: usize, y: usize, x: usize) -> f64 {
        self.weights[self.weight_index(f, d, y, x)]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub(crate) fn with_parameters(&self, weights: Vec<f64>, biases: Vec<f64>) -> FilterBank {
        FilterBank {
            weights,
            biases,
            ..self.clone()
        }
    }
}

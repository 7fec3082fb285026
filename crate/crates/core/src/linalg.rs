//! Small dense vectors and row-major matrices with the operator vocabulary
//! used by the dense layers.
//!
//! Every binary operator takes a [`ZipMode`]: `Strict` rejects operands of
//! different lengths, `Truncate` silently uses the shorter length, the way a
//! list `zipWith` does.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZipMode {
    #[default]
    Strict,
    Truncate,
}

/// Which sigmoid derivative and delta formulas backpropagation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackpropMode {
    /// Logit-based derivative on `a_{l-1}`, truncating zips and the
    /// `a_{l-1} ⊛ δ_l` update orientation.
    PaperVerbatim,
    /// Conventional backpropagation: `a_l (1 - a_l)`, strict dimensions and
    /// `δ_l ⊛ a_{l-1}`.
    #[default]
    Standard,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Validates that every entry is finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite("vector", &values)?;
        Ok(Vector(values))
    }

    /// Wraps values produced by arithmetic on already-validated data.
    pub fn from_raw(values: Vec<f64>) -> Self {
        Vector(values)
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scale(&self, factor: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * factor).collect())
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl FromIterator<f64> for Vector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

/// A row-major matrix; rows index outputs and columns index inputs.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyOperand { op: "matrix" });
        }
        if data.len() != rows * cols {
            return Err(Error::dims("matrix", rows * cols, data.len()));
        }
        check_finite("matrix", &data)?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::dims("matrix rows", m, bad.len()));
        }
        Matrix::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `(rows, cols)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}", self.rows, self.cols)?;
        f.debug_list().entries(self.data.chunks(self.cols)).finish()
    }
}

pub(crate) fn check_finite(context: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(&value) => Err(Error::NonFinite { context, value }),
        None => Ok(()),
    }
}

fn zip_with(
    op: &'static str,
    x: &[f64],
    y: &[f64],
    mode: ZipMode,
    f: impl Fn(f64, f64) -> f64,
) -> Result<Vector> {
    if mode == ZipMode::Strict && x.len() != y.len() {
        return Err(Error::dims(op, x.len(), y.len()));
    }
    Ok(x.iter().zip(y).map(|(a, b)| f(*a, *b)).collect())
}

pub fn vec_add(x: &[f64], y: &[f64], mode: ZipMode) -> Result<Vector> {
    zip_with("vec_add", x, y, mode, |a, b| a + b)
}

pub fn vec_sub(x: &[f64], y: &[f64], mode: ZipMode) -> Result<Vector> {
    zip_with("vec_sub", x, y, mode, |a, b| a - b)
}

/// Elementwise (Hadamard) product.
pub fn vec_mul(x: &[f64], y: &[f64], mode: ZipMode) -> Result<Vector> {
    zip_with("vec_mul", x, y, mode, |a, b| a * b)
}

/// `result[i] = Σ_j m[i][j] · y[j]`, summed left to right.
pub fn mat_vec(m: &Matrix, y: &[f64], mode: ZipMode) -> Result<Vector> {
    if mode == ZipMode::Strict && m.cols != y.len() {
        return Err(Error::dims("mat_vec", m.cols, y.len()));
    }
    Ok((0..m.rows)
        .map(|i| m.row(i).iter().zip(y).fold(0.0, |acc, (w, v)| acc + w * v))
        .collect())
}

/// Rowwise [`vec_sub`]; `Truncate` trims both row count and row length.
pub fn mat_sub(a: &Matrix, b: &Matrix, mode: ZipMode) -> Result<Matrix> {
    if mode == ZipMode::Strict && a.dims() != b.dims() {
        return Err(Error::dims(
            "mat_sub",
            format!("{}x{}", a.rows, a.cols),
            format!("{}x{}", b.rows, b.cols),
        ));
    }
    let rows = a.rows.min(b.rows);
    let cols = a.cols.min(b.cols);
    let mut data = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        data.extend(
            a.row(i)[..cols]
                .iter()
                .zip(&b.row(i)[..cols])
                .map(|(x, y)| x - y),
        );
    }
    Ok(Matrix::from_raw(rows, cols, data))
}

/// `result[i][j] = x[i] · y[j]`.
pub fn outer(x: &[f64], y: &[f64]) -> Result<Matrix> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyOperand { op: "outer" });
    }
    let data = x
        .iter()
        .flat_map(|a| y.iter().map(move |b| a * b))
        .collect();
    Ok(Matrix::from_raw(x.len(), y.len(), data))
}

pub fn transpose(m: &Matrix) -> Matrix {
    let mut data = Vec::with_capacity(m.data.len());
    for j in 0..m.cols {
        data.extend((0..m.rows).map(|i| m.get(i, j)));
    }
    Matrix::from_raw(m.cols, m.rows, data)
}

pub fn sigmoid_scalar(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn sigmoid(x: &[f64]) -> Vector {
    x.iter().map(|&v| sigmoid_scalar(v)).collect()
}

/// Derivative of the sigmoid expressed in terms of its output.
///
/// `Standard` computes `x (1 - x)`. `PaperVerbatim` first inverts the
/// sigmoid, `y = ln(x / (1 - x))`, and returns `y (1 - y)`; it is only
/// defined for entries strictly inside `(0, 1)`.
pub fn sigmoid_prime(x: &[f64], mode: BackpropMode) -> Result<Vector> {
    match mode {
        BackpropMode::Standard => Ok(x.iter().map(|&v| v * (1.0 - v)).collect()),
        BackpropMode::PaperVerbatim => x
            .iter()
            .map(|&v| {
                if v > 0.0 && v < 1.0 {
                    let y = (v / (1.0 - v)).ln();
                    Ok(y * (1.0 - y))
                } else {
                    Err(Error::Domain {
                        op: "sigmoid_prime",
                        value: v,
                        domain: "(0, 1)",
                    })
                }
            })
            .collect(),
    }
}

/// Pearson correlation coefficient of paired samples.
pub fn pearson_corr(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::dims("pearson_corr", xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateInput {
            op: "pearson_corr",
            reason: format!("need at least 2 samples, got {}", xs.len()),
        });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput {
            op: "pearson_corr",
            reason: "zero variance".into(),
        });
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

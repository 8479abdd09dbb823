//! Order-N dense tensor algebra.
//!
//! Tensors are stored as a shape vector plus a contiguous value buffer in
//! column-major order (first index fastest), so `reshape` between a tensor and
//! its generalized unfolding is a pure reinterpretation of the buffer. The
//! operations here are the algebraic bedrock for everything else in the crate:
//! generalized transposition (`permute`/`ipermute`), generalized
//! unfolding/folding, mode products, and the circulant mode-wise gradient and
//! its adjoint.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::rng::rng_from;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("shape {shape:?} requires {expected} values, got {got}")]
    ShapeDataMismatch {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },
    #[error("empty shape: tensors must have order >= 1")]
    EmptyShape,
    #[error("zero extent in shape {0:?}")]
    ZeroExtent(Vec<usize>),
    #[error("{0:?} is not a valid permutation for order {1}")]
    InvalidPermutation(Vec<usize>, usize),
    #[error("mode {mode} out of range for order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("split point {d} invalid: need 1 <= d <= {order} - 1")]
    SplitOutOfRange { d: usize, order: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A permutation of the mode indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self, TensorError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &k in &order {
            if k >= n || seen[k] {
                return Err(TensorError::InvalidPermutation(order.clone(), n));
            }
            seen[k] = true;
        }
        Ok(Self(order))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    /// The inverse permutation: `inv[self[k]] = k`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &v) in self.0.iter().enumerate() {
            inv[v] = k;
        }
        Self(inv)
    }

    /// Permutation that brings `mode` to the front, keeping the remaining
    /// modes in ascending order.
    pub fn mode_first(mode: usize, order: usize) -> Result<Self, TensorError> {
        if mode >= order {
            return Err(TensorError::ModeOutOfRange { mode, order });
        }
        let mut v = Vec::with_capacity(order);
        v.push(mode);
        v.extend((0..order).filter(|&k| k != mode));
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl std::ops::Index<usize> for Permutation {
    type Output = usize;
    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

/// Dense order-N real tensor in column-major layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

/// Column-major strides for `shape`.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = Vec::with_capacity(shape.len());
    let mut acc = 1;
    for &e in shape {
        s.push(acc);
        acc *= e;
    }
    s
}

fn check_shape(shape: &[usize]) -> Result<usize, TensorError> {
    if shape.is_empty() {
        return Err(TensorError::EmptyShape);
    }
    if shape.iter().any(|&e| e == 0) {
        return Err(TensorError::ZeroExtent(shape.to_vec()));
    }
    Ok(shape.iter().product())
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        let expected = check_shape(&shape)?;
        if data.len() != expected {
            return Err(TensorError::ShapeDataMismatch {
                shape,
                expected,
                got: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = check_shape(shape).expect("invalid shape");
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; n],
        }
    }

    pub fn constant(shape: &[usize], value: f64) -> Self {
        let n = check_shape(shape).expect("invalid shape");
        Self {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    /// Builds a tensor from a function of the multi-index.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let n = check_shape(shape).expect("invalid shape");
        let order = shape.len();
        let mut idx = vec![0usize; order];
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(f(&idx));
            for ax in 0..order {
                idx[ax] += 1;
                if idx[ax] < shape[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Self {
            shape: shape.to_vec(),
            data,
        }
    }

    /// I.i.d. standard normal entries, deterministic per seed.
    pub fn random_normal(shape: &[usize], seed: u64) -> Self {
        let n = check_shape(shape).expect("invalid shape");
        let mut rng = rng_from(seed);
        let data = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        Self {
            shape: shape.to_vec(),
            data,
        }
    }

    /// I.i.d. uniform entries on `[lo, hi)`, deterministic per seed.
    pub fn random_uniform(shape: &[usize], lo: f64, hi: f64, seed: u64) -> Self {
        let n = check_shape(shape).expect("invalid shape");
        let mut rng = rng_from(seed);
        let data = (0..n)
            .map(|_| lo + (hi - lo) * rng.random::<f64>())
            .collect();
        Self {
            shape: shape.to_vec(),
            data,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.order());
        let mut lin = 0;
        let mut stride = 1;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.shape[k]);
            lin += i * stride;
            stride *= self.shape[k];
        }
        lin
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let lin = self.linear_index(idx);
        self.data[lin] = value;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dot(&self, other: &DenseTensor) -> f64 {
        debug_assert_eq!(self.shape, other.shape);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &DenseTensor) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn sub(&self, other: &DenseTensor) -> DenseTensor {
        debug_assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        DenseTensor {
            shape: self.shape.clone(),
            data,
        }
    }

    pub fn add(&self, other: &DenseTensor) -> DenseTensor {
        debug_assert_eq!(self.shape, other.shape);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        DenseTensor {
            shape: self.shape.clone(),
            data,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Generalized tensor transposition: mode `k` of the result is mode `n[k]`
    /// of the input, so the result shape is `(I_{n[0]}, ..., I_{n[N-1]})`.
    pub fn permute(&self, n: &Permutation) -> Result<DenseTensor, TensorError> {
        let order = self.order();
        if n.len() != order {
            return Err(TensorError::InvalidPermutation(
                n.as_slice().to_vec(),
                order,
            ));
        }
        let out_shape: Vec<usize> = n.as_slice().iter().map(|&k| self.shape[k]).collect();
        let in_strides = strides(&self.shape);
        // input stride to advance when the k-th output counter increments
        let walk: Vec<usize> = n.as_slice().iter().map(|&k| in_strides[k]).collect();
        let mut out = vec![0.0; self.data.len()];
        let mut counters = vec![0usize; order];
        let mut in_lin = 0usize;
        for slot in out.iter_mut() {
            *slot = self.data[in_lin];
            for ax in 0..order {
                counters[ax] += 1;
                if counters[ax] < out_shape[ax] {
                    in_lin += walk[ax];
                    break;
                }
                counters[ax] = 0;
                in_lin -= walk[ax] * (out_shape[ax] - 1);
            }
        }
        Ok(DenseTensor {
            shape: out_shape,
            data: out,
        })
    }

    /// Inverse of [`DenseTensor::permute`]: `x.permute(n)?.ipermute(n) == x`
    /// bit-exactly.
    pub fn ipermute(&self, n: &Permutation) -> Result<DenseTensor, TensorError> {
        if n.len() != self.order() {
            return Err(TensorError::InvalidPermutation(
                n.as_slice().to_vec(),
                self.order(),
            ));
        }
        self.permute(&n.inverse())
    }

    /// Generalized unfolding: permutes by `n`, then reinterprets the buffer as
    /// a `(prod of first d extents) x (prod of the rest)` column-major matrix.
    pub fn unfold(&self, n: &Permutation, d: usize) -> Result<DMatrix<f64>, TensorError> {
        let order = self.order();
        if d == 0 || d >= order {
            return Err(TensorError::SplitOutOfRange { d, order });
        }
        let permuted = self.permute(n)?;
        let rows: usize = permuted.shape[..d].iter().product();
        let cols: usize = permuted.shape[d..].iter().product();
        Ok(DMatrix::from_vec(rows, cols, permuted.data))
    }

    /// Inverse of [`DenseTensor::unfold`]: folds the matrix back into a tensor
    /// of the given `shape` assuming it was unfolded with `(n, d)`.
    pub fn fold(
        m: &DMatrix<f64>,
        shape: &[usize],
        n: &Permutation,
        d: usize,
    ) -> Result<DenseTensor, TensorError> {
        let order = shape.len();
        check_shape(shape)?;
        if d == 0 || d >= order {
            return Err(TensorError::SplitOutOfRange { d, order });
        }
        if n.len() != order {
            return Err(TensorError::InvalidPermutation(
                n.as_slice().to_vec(),
                order,
            ));
        }
        let perm_shape: Vec<usize> = n.as_slice().iter().map(|&k| shape[k]).collect();
        let rows: usize = perm_shape[..d].iter().product();
        let cols: usize = perm_shape[d..].iter().product();
        if m.nrows() != rows || m.ncols() != cols {
            return Err(TensorError::DimensionMismatch(format!(
                "matrix is {}x{}, but shape {:?} split at {} under {:?} requires {}x{}",
                m.nrows(),
                m.ncols(),
                shape,
                d,
                n.as_slice(),
                rows,
                cols
            )));
        }
        let permuted = DenseTensor {
            shape: perm_shape,
            data: m.as_slice().to_vec(),
        };
        permuted.ipermute(n)
    }

    /// Mode-`t` product with a matrix: the mode-`t` unfolding of the result is
    /// `u` times the mode-`t` unfolding of `self`.
    pub fn mode_product(&self, u: &DMatrix<f64>, t: usize) -> Result<DenseTensor, TensorError> {
        let order = self.order();
        if t >= order {
            return Err(TensorError::ModeOutOfRange { mode: t, order });
        }
        if u.ncols() != self.shape[t] {
            return Err(TensorError::DimensionMismatch(format!(
                "matrix has {} columns, mode {} extent is {}",
                u.ncols(),
                t,
                self.shape[t]
            )));
        }
        let n = Permutation::mode_first(t, order)?;
        let a = self.unfold(&n, 1)?;
        let b = crate::linalg::mm(u, &a);
        let mut new_shape = self.shape.clone();
        new_shape[t] = u.nrows();
        Self::fold(&b, &new_shape, &n, 1)
    }

    /// Cyclic forward difference along mode `t`:
    /// `out[.., i, ..] = x[.., i+1 mod I_t, ..] - x[.., i, ..]`.
    ///
    /// Equals the mode-`t` product with the row-circulant matrix of
    /// `(-1, 1, 0, ..., 0)`.
    pub fn gradient(&self, t: usize) -> Result<DenseTensor, TensorError> {
        self.cyclic_diff(t, false)
    }

    /// Adjoint of [`DenseTensor::gradient`]:
    /// `out[.., i, ..] = x[.., i-1 mod I_t, ..] - x[.., i, ..]`.
    pub fn gradient_adjoint(&self, t: usize) -> Result<DenseTensor, TensorError> {
        self.cyclic_diff(t, true)
    }

    fn cyclic_diff(&self, t: usize, adjoint: bool) -> Result<DenseTensor, TensorError> {
        let order = self.order();
        if t >= order {
            return Err(TensorError::ModeOutOfRange { mode: t, order });
        }
        let extent = self.shape[t];
        let inner: usize = self.shape[..t].iter().product();
        let outer: usize = self.shape[t + 1..].iter().product();
        let mut out = vec![0.0; self.data.len()];
        for o in 0..outer {
            let base = o * inner * extent;
            for i in 0..extent {
                let j = if adjoint {
                    (i + extent - 1) % extent
                } else {
                    (i + 1) % extent
                };
                let dst = base + i * inner;
                let src_i = base + i * inner;
                let src_j = base + j * inner;
                for k in 0..inner {
                    out[dst + k] = self.data[src_j + k] - self.data[src_i + k];
                }
            }
        }
        Ok(DenseTensor {
            shape: self.shape.clone(),
            data: out,
        })
    }
}

/// Borrows a tensor's buffer as a column-major matrix view when the requested
/// unfolding needs no data movement (mode 0 first, remaining modes ascending).
pub(crate) fn unfold_mode0_dims(shape: &[usize]) -> (usize, usize) {
    (shape[0], shape[1..].iter().product())
}

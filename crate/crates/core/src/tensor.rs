//! Dense d-order tensors and the elementary multilinear operations.
//!
//! Storage is a single flat array with the first index varying fastest, so the
//! mode-1 unfolding is a plain reinterpretation of the buffer. Unfoldings follow
//! the Kolda column ordering: for mode µ, element `(i_1, .., i_d)` lands in row
//! `i_µ` and column `1 + Σ_{α≠µ} (i_α − 1) m_α` with `m_α = Π_{β<α, β≠µ} n_β`.
//!
//! Modes and tensor multi-indices are 1-based in this API. Matrices are
//! [`nalgebra::DMatrix`] and keep nalgebra's 0-based `(row, col)` indexing.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

pub type DenseMatrix = DMatrix<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor from a first-index-fastest buffer.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        check_shape(&shape)?;
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "shape {:?} needs {} entries, got {}",
                shape,
                len,
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        check_shape(&shape)?;
        let len = shape.iter().product();
        Ok(Self {
            shape,
            data: vec![0.0; len],
        })
    }

    /// Builds a tensor by evaluating `f` at every 1-based multi-index.
    pub fn from_fn<F>(shape: Vec<usize>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        let mut t = Self::zeros(shape)?;
        let mut idx = vec![1usize; t.order()];
        for flat in 0..t.data.len() {
            t.data[flat] = f(&idx);
            advance(&mut idx, &t.shape);
        }
        Ok(t)
    }

    /// Elementary tensor `a_1 ⊗ a_2 ⊗ … ⊗ a_d`.
    pub fn outer(vectors: &[&[f64]]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidShape(Vec::new()));
        }
        let shape: Vec<usize> = vectors.iter().map(|v| v.len()).collect();
        Self::from_fn(shape, |idx| {
            idx.iter()
                .zip(vectors)
                .map(|(&i, v)| v[i - 1])
                .product()
        })
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

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Flat buffer position of a 1-based multi-index.
    pub fn flat_index(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.order() {
            return None;
        }
        let mut flat = 0;
        let mut stride = 1;
        for (&i, &n) in index.iter().zip(&self.shape) {
            if i == 0 || i > n {
                return None;
            }
            flat += (i - 1) * stride;
            stride *= n;
        }
        Some(flat)
    }

    pub fn get(&self, index: &[usize]) -> Option<f64> {
        self.flat_index(index).map(|p| self.data[p])
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let p = self.flat_index(index).ok_or_else(|| {
            Error::ShapeMismatch(format!("index {:?} outside shape {:?}", index, self.shape))
        })?;
        self.data[p] = value;
        Ok(())
    }

    /// Visits every entry with its 1-based multi-index, in storage order.
    pub fn for_each_indexed<F>(&self, mut f: F)
    where
        F: FnMut(&[usize], f64),
    {
        let mut idx = vec![1usize; self.order()];
        for &v in &self.data {
            f(&idx, v);
            advance(&mut idx, &self.shape);
        }
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, f: F) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.data.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

fn check_shape(shape: &[usize]) -> Result<()> {
    if shape.is_empty() || shape.contains(&0) {
        return Err(Error::InvalidShape(shape.to_vec()));
    }
    Ok(())
}

/// Odometer step over 1-based indices, first index fastest.
fn advance(idx: &mut [usize], shape: &[usize]) {
    for (i, &n) in idx.iter_mut().zip(shape) {
        if *i < n {
            *i += 1;
            return;
        }
        *i = 1;
    }
}

fn check_mode(order: usize, mode: usize) -> Result<()> {
    if mode == 0 || mode > order {
        return Err(Error::ModeOutOfRange { mode, order });
    }
    Ok(())
}

/// Sizes of the index blocks before and after `mode` (0-based position).
fn split_sizes(shape: &[usize], pos: usize) -> (usize, usize, usize) {
    let left: usize = shape[..pos].iter().product();
    let right: usize = shape[pos + 1..].iter().product();
    (left, shape[pos], right)
}

/// Mode-`mode` matricization (1-based mode).
pub fn unfold(t: &DenseTensor, mode: usize) -> Result<DenseMatrix> {
    check_mode(t.order(), mode)?;
    let (left, n, right) = split_sizes(&t.shape, mode - 1);
    let mut m = DenseMatrix::zeros(n, left * right);
    for r in 0..right {
        for i in 0..n {
            let src = left * (i + n * r);
            for l in 0..left {
                m[(i, l + left * r)] = t.data[src + l];
            }
        }
    }
    Ok(m)
}

/// Inverse of [`unfold`] for a tensor of the given shape.
pub fn fold(m: &DenseMatrix, mode: usize, shape: &[usize]) -> Result<DenseTensor> {
    check_shape(shape)?;
    check_mode(shape.len(), mode)?;
    let (left, n, right) = split_sizes(shape, mode - 1);
    if m.nrows() != n || m.ncols() != left * right {
        return Err(Error::ShapeMismatch(format!(
            "cannot fold a {}x{} matrix at mode {} into shape {:?}",
            m.nrows(),
            m.ncols(),
            mode,
            shape
        )));
    }
    let mut data = vec![0.0; n * left * right];
    for r in 0..right {
        for i in 0..n {
            let dst = left * (i + n * r);
            for l in 0..left {
                data[dst + l] = m[(i, l + left * r)];
            }
        }
    }
    Ok(DenseTensor {
        shape: shape.to_vec(),
        data,
    })
}

/// Mode-`mode` product `t ×_µ m`: replaces dimension `n_µ` by `m.nrows()`.
pub fn ttm_mode(t: &DenseTensor, m: &DenseMatrix, mode: usize) -> Result<DenseTensor> {
    check_mode(t.order(), mode)?;
    let n = t.shape[mode - 1];
    if m.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "mode {} has dimension {} but matrix has {} columns",
            mode,
            n,
            m.ncols()
        )));
    }
    let product = m * unfold(t, mode)?;
    let mut shape = t.shape.clone();
    shape[mode - 1] = m.nrows();
    fold(&product, mode, &shape)
}

/// Tensor-times-matrix product `(M_1, …, M_d) t`. `None` stands for the identity.
pub fn ttm(t: &DenseTensor, matrices: &[Option<&DenseMatrix>]) -> Result<DenseTensor> {
    if matrices.len() != t.order() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} mode matrices, got {}",
            t.order(),
            matrices.len()
        )));
    }
    let mut out = t.clone();
    for (pos, m) in matrices.iter().enumerate() {
        if let Some(m) = m {
            out = ttm_mode(&out, m, pos + 1)?;
        }
    }
    Ok(out)
}

/// Multiplies every mode-µ fibre elementwise by `weights[µ]`, i.e. the TTM
/// product with diagonal matrices.
pub fn scale_modes(t: &DenseTensor, weights: &[&[f64]]) -> Result<DenseTensor> {
    if weights.len() != t.order() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} weight vectors, got {}",
            t.order(),
            weights.len()
        )));
    }
    for (pos, (w, &n)) in weights.iter().zip(&t.shape).enumerate() {
        if w.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "mode {} has dimension {} but weight vector has length {}",
                pos + 1,
                n,
                w.len()
            )));
        }
    }
    let mut out = t.clone();
    for (pos, w) in weights.iter().enumerate() {
        let (left, n, right) = split_sizes(&t.shape, pos);
        for r in 0..right {
            for (i, &wi) in w.iter().enumerate() {
                let base = left * (i + n * r);
                for v in &mut out.data[base..base + left] {
                    *v *= wi;
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product: block `(i, j)` of the result is `a[(i, j)] · b`.
pub fn kronecker(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = a.shape();
    let (r, s) = b.shape();
    let mut out = DenseMatrix::zeros(p * r, q * s);
    for j in 0..q {
        for i in 0..p {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            for l in 0..s {
                for k in 0..r {
                    out[(i * r + k, j * s + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `m_1 ⊗ m_2 ⊗ … ⊗ m_k`, left to right. Returns `None` on an empty list.
pub fn kronecker_chain(mats: &[&DenseMatrix]) -> Option<DenseMatrix> {
    let (first, rest) = mats.split_first()?;
    Some(rest.iter().fold((*first).clone(), |acc, m| kronecker(&acc, m)))
}

//! Dense even-order tensors with split row/column multi-dimensions and the
//! Einstein product.
//!
//! Entries are stored row-major over the concatenated multi-index
//! (i_1..i_N, j_1..j_M), which makes the tensor↔matrix isomorphism a plain
//! reinterpretation of the same buffer: linearizing the row multi-index gives
//! the matrix row, the column multi-index the matrix column, and the Einstein
//! product turns into matrix multiplication.

use std::fmt;

use thiserror::Error;

use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("dimension lists must be non-empty with all entries >= 1, got {0:?}")]
    BadDims(Vec<usize>),
    #[error("entry count {got} does not match shape {shape} (expected {expected})")]
    EntryCount { shape: Shape, expected: usize, got: usize },
    #[error("{op}: contracted axes mismatch, left column dims {lhs:?} vs right row dims {rhs:?}")]
    ContractionMismatch { op: &'static str, lhs: Vec<usize>, rhs: Vec<usize> },
    #[error("{op}: shapes differ, {lhs} vs {rhs}")]
    ShapeMismatch { op: &'static str, lhs: Shape, rhs: Shape },
    #[error("{op}: tensor of shape {shape} is not square")]
    NotSquare { op: &'static str, shape: Shape },
    #[error("multi-index {idx:?} out of range for shape {shape} (1-based)")]
    IndexOutOfRange { idx: Vec<usize>, shape: Shape },
    #[error("matrix {rows}x{cols} is not compatible with shape {shape}")]
    MatrixShape { rows: usize, cols: usize, shape: Shape },
}

/// Row and column multi-dimensions (I_1..I_N | J_1..J_M).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    row_dims: Vec<usize>,
    col_dims: Vec<usize>,
}

impl Shape {
    pub fn new(row_dims: Vec<usize>, col_dims: Vec<usize>) -> Result<Self, TensorError> {
        for dims in [&row_dims, &col_dims] {
            if dims.is_empty() || dims.contains(&0) {
                return Err(TensorError::BadDims(dims.clone()));
            }
        }
        Ok(Shape { row_dims, col_dims })
    }

    pub fn square(dims: Vec<usize>) -> Result<Self, TensorError> {
        Shape::new(dims.clone(), dims)
    }

    pub fn row_dims(&self) -> &[usize] {
        &self.row_dims
    }

    pub fn col_dims(&self) -> &[usize] {
        &self.col_dims
    }

    /// Product of the row dimensions (matricized row count).
    pub fn row_len(&self) -> usize {
        self.row_dims.iter().product()
    }

    /// Product of the column dimensions (matricized column count).
    pub fn col_len(&self) -> usize {
        self.col_dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.row_len() * self.col_len()
    }

    /// Never true: every dimension is at least 1.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Strict elementwise equality of the two dimension lists.
    pub fn is_square(&self) -> bool {
        self.row_dims == self.col_dims
    }

    pub fn transposed(&self) -> Shape {
        Shape { row_dims: self.col_dims.clone(), col_dims: self.row_dims.clone() }
    }

    /// Flat row-major offset of a 1-based full multi-index
    /// (i_1..i_N, j_1..j_M), if in range.
    pub fn flat_index(&self, idx: &[usize]) -> Option<usize> {
        let n = self.row_dims.len();
        if idx.len() != n + self.col_dims.len() {
            return None;
        }
        let r = linearize(&self.row_dims, &idx[..n])?;
        let c = linearize(&self.col_dims, &idx[n..])?;
        Some(r * self.col_len() + c)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}|{:?})", self.row_dims, self.col_dims)
    }
}

fn linearize(dims: &[usize], idx: &[usize]) -> Option<usize> {
    // idx is 1-based, row-major
    if idx.len() != dims.len() {
        return None;
    }
    let mut flat = 0usize;
    for (&d, &i) in dims.iter().zip(idx) {
        if i == 0 || i > d {
            return None;
        }
        flat = flat * d + (i - 1);
    }
    Some(flat)
}

/// Dense even-order tensor over one scalar domain. Immutable after
/// construction; all operations are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T: Scalar> {
    shape: Shape,
    entries: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn new(shape: Shape, entries: Vec<T>) -> Result<Self, TensorError> {
        if entries.len() != shape.len() {
            return Err(TensorError::EntryCount {
                expected: shape.len(),
                got: entries.len(),
                shape,
            });
        }
        Ok(Tensor { shape, entries })
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let (rows, cols) = (shape.row_len(), shape.col_len());
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Tensor { shape, entries }
    }

    pub fn zero(shape: Shape) -> Self {
        let len = shape.len();
        Tensor { shape, entries: vec![T::zero(); len] }
    }

    /// Unit tensor on the square shape (dims|dims).
    pub fn identity(dims: &[usize]) -> Result<Self, TensorError> {
        let shape = Shape::square(dims.to_vec())?;
        Ok(Tensor::from_fn(shape, |r, c| if r == c { T::one() } else { T::zero() }))
    }

    /// Diagonal tensor on (dims|dims) with the given diagonal values
    /// (row-major over the multi-index).
    pub fn diagonal(dims: &[usize], values: &[T]) -> Result<Self, TensorError> {
        let shape = Shape::square(dims.to_vec())?;
        let n = shape.row_len();
        if values.len() != n {
            return Err(TensorError::EntryCount { expected: n, got: values.len(), shape });
        }
        Ok(Tensor::from_fn(shape, |r, c| {
            if r == c {
                values[r].clone()
            } else {
                T::zero()
            }
        }))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn domain(&self) -> crate::scalar::Domain {
        T::DOMAIN
    }

    /// Entry at the 1-based full multi-index (i_1..i_N, j_1..j_M).
    pub fn get(&self, idx: &[usize]) -> Result<&T, TensorError> {
        let n = self.shape.row_dims.len();
        let err = || TensorError::IndexOutOfRange { idx: idx.to_vec(), shape: self.shape.clone() };
        if idx.len() != n + self.shape.col_dims.len() {
            return Err(err());
        }
        let r = linearize(&self.shape.row_dims, &idx[..n]).ok_or_else(err)?;
        let c = linearize(&self.shape.col_dims, &idx[n..]).ok_or_else(err)?;
        Ok(&self.entries[r * self.shape.col_len() + c])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// True when every entry has magnitude at most `tol` (structural zero
    /// when `tol` is 0).
    pub fn is_zero_within(&self, tol: f64) -> bool {
        if tol == 0.0 {
            self.is_zero()
        } else {
            self.entries.iter().all(|e| e.abs_f64() <= tol)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.abs_f64()).fold(0.0, f64::max)
    }

    /// Einstein product: contract this tensor's column multi-index against
    /// the other's row multi-index.
    pub fn einstein_product(&self, rhs: &Tensor<T>) -> Result<Tensor<T>, TensorError> {
        if self.shape.col_dims != rhs.shape.row_dims {
            return Err(TensorError::ContractionMismatch {
                op: "einstein_product",
                lhs: self.shape.col_dims.clone(),
                rhs: rhs.shape.row_dims.clone(),
            });
        }
        let shape = Shape::new(self.shape.row_dims.clone(), rhs.shape.col_dims.clone())?;
        let (m, h, n) = (self.shape.row_len(), self.shape.col_len(), rhs.shape.col_len());
        let mut entries = vec![T::zero(); m * n];
        for i in 0..m {
            for k in 0..h {
                let a = &self.entries[i * h + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] = entries[i * n + j].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(Tensor { shape, entries })
    }

    pub fn add(&self, rhs: &Tensor<T>) -> Result<Tensor<T>, TensorError> {
        self.zip(rhs, "add", |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &Tensor<T>) -> Result<Tensor<T>, TensorError> {
        self.zip(rhs, "sub", |a, b| a.sub(b))
    }

    fn zip(
        &self,
        rhs: &Tensor<T>,
        op: &'static str,
        f: impl Fn(&T, &T) -> T,
    ) -> Result<Tensor<T>, TensorError> {
        if self.shape != rhs.shape {
            return Err(TensorError::ShapeMismatch {
                op,
                lhs: self.shape.clone(),
                rhs: rhs.shape.clone(),
            });
        }
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect();
        Ok(Tensor { shape: self.shape.clone(), entries })
    }

    pub fn scale(&self, s: &T) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|e| e.mul(s)).collect(),
        }
    }

    pub fn neg(&self) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    /// l-th Einstein power of a square tensor, with the 0-th power the unit
    /// tensor.
    pub fn power(&self, l: usize) -> Result<Tensor<T>, TensorError> {
        if !self.shape.is_square() {
            return Err(TensorError::NotSquare { op: "power", shape: self.shape.clone() });
        }
        let mut acc = Tensor::identity(self.shape.row_dims())?;
        for _ in 0..l {
            acc = acc.einstein_product(self)?;
        }
        Ok(acc)
    }

    /// The matricization: same entries, rows indexed by the linearized row
    /// multi-index, columns by the linearized column multi-index.
    pub fn matricize(&self) -> Matrix<T> {
        Matrix::from_vec(self.shape.row_len(), self.shape.col_len(), self.entries.clone())
    }

    /// Matricization that remembers where it came from, so the inverse map
    /// needs no external shape.
    pub fn matricized(&self) -> MatricizedMatrix<T> {
        MatricizedMatrix { matrix: self.matricize(), provenance: self.shape.clone() }
    }

    /// Inverse of `matricize` for a matrix whose dimensions match the shape
    /// products.
    pub fn dematricize(m: &Matrix<T>, shape: Shape) -> Result<Tensor<T>, TensorError> {
        if m.rows() != shape.row_len() || m.cols() != shape.col_len() {
            return Err(TensorError::MatrixShape { rows: m.rows(), cols: m.cols(), shape });
        }
        Ok(Tensor { shape, entries: m.data().to_vec() })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl Tensor<Rational> {
    /// Entrywise nearest-float image of an exact tensor.
    pub fn to_float64(&self) -> Tensor<f64> {
        self.map(|e| e.to_f64())
    }
}

/// A matrix together with the tensor shape it was unfolded from.
#[derive(Debug, Clone, PartialEq)]
pub struct MatricizedMatrix<T: Scalar> {
    matrix: Matrix<T>,
    provenance: Shape,
}

impl<T: Scalar> MatricizedMatrix<T> {
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn provenance(&self) -> &Shape {
        &self.provenance
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Fold back to the originating shape, bit-exactly.
    pub fn to_tensor(&self) -> Tensor<T> {
        Tensor::dematricize(&self.matrix, self.provenance.clone()).expect("provenance matches")
    }
}

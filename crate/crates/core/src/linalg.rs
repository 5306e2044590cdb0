//! Dense row-major matrices and symmetric CSR matrices.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix({}x{}) [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            write!(f, "{:?}{}", row, if r + 1 < self.rows { ", " } else { "" })?;
        }
        if self.rows > 8 {
            write!(f, "...")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::shape(
                "from_vec",
                format!("{} values for a {rows}x{cols} matrix", data.len()),
            ));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// `rows x 1` column vector.
    pub fn column(values: Vec<T>) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    pub fn scalar(value: T) -> Self {
        Matrix {
            rows: 1,
            cols: 1,
            data: vec![value],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Value of a `1 x 1` matrix.
    pub fn item(&self) -> T {
        debug_assert_eq!(self.data.len(), 1);
        self.data[0]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn map_inplace(&mut self, f: impl Fn(T) -> T) {
        for v in self.data.iter_mut() {
            *v = f(*v);
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    fn check_same(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                op,
                format!("{:?} vs {:?}", self.shape(), other.shape()),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other, "add")?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// Elementwise `self += other`; shapes must already agree.
    pub fn add_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: T) {
        for v in self.data.iter_mut() {
            *v *= s;
        }
    }

    /// Adds `bias` (a `1 x cols` row) to every row.
    pub fn add_row(&self, bias: &Self) -> Result<Self> {
        if bias.rows != 1 || bias.cols != self.cols {
            return Err(Error::shape(
                "add_row",
                format!("{:?} + row {:?}", self.shape(), bias.shape()),
            ));
        }
        let mut out = self.clone();
        for r in 0..out.rows {
            for (a, &b) in out.row_mut(r).iter_mut().zip(&bias.data) {
                *a += b;
            }
        }
        Ok(out)
    }

    pub fn relu(&self) -> Self {
        self.map(|v| if v > T::zero() { v } else { T::zero() })
    }

    pub fn sum(&self) -> T {
        self.data.iter().copied().sum()
    }

    pub fn sum_squares(&self) -> T {
        self.data.iter().map(|&v| v * v).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, &v| if v.abs() > m { v.abs() } else { m })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::shape(
                "matmul",
                format!("{:?} x {:?}", self.shape(), other.shape()),
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                axpy(out_row, a, other.row(k));
            }
        }
        Ok(out)
    }

    /// `self * other^T`.
    pub fn matmul_transposed(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::shape(
                "matmul_transposed",
                format!("{:?} x {:?}^T", self.shape(), other.shape()),
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..other.rows {
                out.data[i * other.rows + j] = dot(a, other.row(j));
            }
        }
        Ok(out)
    }

    /// `self^T * other`.
    pub fn transposed_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::shape(
                "transposed_matmul",
                format!("{:?}^T x {:?}", self.shape(), other.shape()),
            ));
        }
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let b = other.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                axpy(&mut out.data[i * other.cols..(i + 1) * other.cols], a, b);
            }
        }
        Ok(out)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.to_f64_lossless()).collect(),
        }
    }

    pub fn from_f64(m: &Matrix<f64>) -> Self {
        Matrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|&v| T::from_f64_lossy(v)).collect(),
        }
    }
}

#[inline]
fn axpy<T: Scalar>(y: &mut [T], a: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Square CSR matrix that is symmetric in both pattern and values, so it is
/// its own transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Plain adjacency `A` of the graph.
    pub fn adjacency(g: &Graph) -> Self {
        SparseMatrix {
            n: g.n(),
            offsets: g.offsets().to_vec(),
            cols: g.targets().to_vec(),
            vals: vec![T::one(); g.targets().len()],
        }
    }

    /// Symmetrically normalized self-looped adjacency
    /// `D~^{-1/2} (A + I) D~^{-1/2}` with `D~_ii = deg(i) + 1`.
    pub fn normalized_adjacency(g: &Graph) -> Self {
        let n = g.n();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|i| 1.0 / ((g.degree(i) + 1) as f64).sqrt())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(g.targets().len() + n);
        let mut vals = Vec::with_capacity(g.targets().len() + n);
        offsets.push(0);
        for i in 0..n {
            let mut self_done = false;
            for &j in g.neighbors(i) {
                if !self_done && j > i {
                    cols.push(i);
                    vals.push(T::from_f64_lossy(inv_sqrt[i] * inv_sqrt[i]));
                    self_done = true;
                }
                cols.push(j);
                vals.push(T::from_f64_lossy(inv_sqrt[i] * inv_sqrt[j]));
            }
            if !self_done {
                cols.push(i);
                vals.push(T::from_f64_lossy(inv_sqrt[i] * inv_sqrt[i]));
            }
            offsets.push(cols.len());
        }
        SparseMatrix {
            n,
            offsets,
            cols,
            vals,
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n,
            offsets: (0..=n).collect(),
            cols: (0..n).collect(),
            vals: vec![T::one(); n],
        }
    }

    /// Sparse copy of a dense matrix; rejects non-square or asymmetric input.
    pub fn from_dense(m: &Matrix<T>) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::shape("from_dense", format!("{:?} is not square", m.shape())));
        }
        let mut offsets = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if v != m.get(j, i) || !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not finite and symmetric at ({i}, {j})"
                    )));
                }
                if v != T::zero() {
                    cols.push(j);
                    vals.push(v);
                }
            }
            offsets.push(cols.len());
        }
        Ok(SparseMatrix {
            n,
            offsets,
            cols,
            vals,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.vals[range].iter().copied())
    }

    pub fn to_dense(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Sparse-dense product `self * d`.
    pub fn spmm(&self, d: &Matrix<T>) -> Result<Matrix<T>> {
        if d.rows() != self.n {
            return Err(Error::shape(
                "spmm",
                format!("({n}x{n}) x {:?}", d.shape(), n = self.n),
            ));
        }
        let f = d.cols();
        let mut out = Matrix::zeros(self.n, f);
        for i in 0..self.n {
            let out_row = &mut out.data_mut()[i * f..(i + 1) * f];
            for k in self.offsets[i]..self.offsets[i + 1] {
                axpy(out_row, self.vals[k], d.row(self.cols[k]));
            }
        }
        Ok(out)
    }
}

//! Reverse-mode differentiation over dense matrices.
//!
//! A [`Tape`] records every value in creation order, so iterating it
//! backwards is a reverse topological order: each node is visited exactly
//! once and its gradient is complete by the time it is reached. Gradients
//! from shared subexpressions accumulate.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SparseMatrix};
use crate::scalar::{lit, Scalar};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(&self) -> usize {
        self.0
    }
}

enum Op<'a, T> {
    Leaf,
    MatMul(Var, Var),
    SpMM(&'a SparseMatrix<T>, Var),
    Add(Var, Var),
    AddRow(Var, Var),
    Relu(Var),
    Tanh(Var),
    Gather(Var, Vec<usize>),
    Mse(Var, Var),
    SumSquares(Var),
    Scale(Var, T),
}

struct Node<'a, T> {
    value: Matrix<T>,
    op: Op<'a, T>,
    requires_grad: bool,
}

/// Recording of one forward computation. Sparse operands are borrowed for
/// the tape's lifetime.
pub struct Tape<'a, T> {
    nodes: Vec<Node<'a, T>>,
}

impl<'a, T: Scalar> Default for Tape<'a, T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<'a, T: Scalar> Tape<'a, T> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Matrix<T>, op: Op<'a, T>, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Trainable input; receives a gradient.
    pub fn param(&mut self, value: Matrix<T>) -> Var {
        self.push(value, Op::Leaf, true)
    }

    /// Input that is never differentiated.
    pub fn constant(&mut self, value: Matrix<T>) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, v: Var) -> &Matrix<T> {
        &self.nodes[v.0].value
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).matmul(self.value(b))?;
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(value, Op::MatMul(a, b), rg))
    }

    /// `s * d` for a symmetric sparse `s`.
    pub fn spmm(&mut self, s: &'a SparseMatrix<T>, d: Var) -> Result<Var> {
        let value = s.spmm(self.value(d))?;
        let rg = self.needs(d);
        Ok(self.push(value, Op::SpMM(s, d), rg))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let value = self.value(a).add(self.value(b))?;
        let rg = self.needs(a) || self.needs(b);
        Ok(self.push(value, Op::Add(a, b), rg))
    }

    /// Adds a `1 x cols` row vector to every row of `x`.
    pub fn add_row(&mut self, x: Var, bias: Var) -> Result<Var> {
        let value = self.value(x).add_row(self.value(bias))?;
        let rg = self.needs(x) || self.needs(bias);
        Ok(self.push(value, Op::AddRow(x, bias), rg))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let value = self.value(x).relu();
        let rg = self.needs(x);
        self.push(value, Op::Relu(x), rg)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        let value = self.value(x).map(|v| v.tanh());
        let rg = self.needs(x);
        self.push(value, Op::Tanh(x), rg)
    }

    /// Rows `ids` of `x`, in order; equivalent to a one-hot selector product.
    pub fn gather_rows(&mut self, x: Var, ids: &[usize]) -> Result<Var> {
        let src = self.value(x);
        if let Some(&bad) = ids.iter().find(|&&i| i >= src.rows()) {
            return Err(Error::NodeOutOfRange {
                id: bad,
                n: src.rows(),
            });
        }
        let cols = src.cols();
        let mut data = Vec::with_capacity(ids.len() * cols);
        for &i in ids {
            data.extend_from_slice(src.row(i));
        }
        let value = Matrix::from_vec(ids.len(), cols, data)?;
        let rg = self.needs(x);
        Ok(self.push(value, Op::Gather(x, ids.to_vec()), rg))
    }

    /// Mean squared difference over all entries, as a `1 x 1` value.
    pub fn mse(&mut self, pred: Var, target: Var) -> Result<Var> {
        let (p, t) = (self.value(pred), self.value(target));
        if p.shape() != t.shape() {
            return Err(Error::shape(
                "mse",
                format!("prediction {:?} vs target {:?}", p.shape(), t.shape()),
            ));
        }
        let count = p.data().len().max(1);
        let sum: T = p
            .data()
            .iter()
            .zip(t.data())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum();
        let value = Matrix::scalar(sum / T::from_usize(count).unwrap());
        let rg = self.needs(pred) || self.needs(target);
        Ok(self.push(value, Op::Mse(pred, target), rg))
    }

    /// Sum of squared entries, as a `1 x 1` value.
    pub fn sum_squares(&mut self, x: Var) -> Var {
        let value = Matrix::scalar(self.value(x).sum_squares());
        let rg = self.needs(x);
        self.push(value, Op::SumSquares(x), rg)
    }

    pub fn scale(&mut self, x: Var, s: T) -> Var {
        let mut value = self.value(x).clone();
        value.scale(s);
        let rg = self.needs(x);
        self.push(value, Op::Scale(x, s), rg)
    }

    /// Gradients of the scalar `loss` with respect to every node that
    /// requires one.
    pub fn backward(&self, loss: Var) -> Result<Gradients<T>> {
        if self.value(loss).shape() != (1, 1) {
            return Err(Error::shape(
                "backward",
                format!("loss must be 1x1, got {:?}", self.value(loss).shape()),
            ));
        }
        let mut grads: Vec<Option<Matrix<T>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Matrix::scalar(T::one()));

        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if !node.requires_grad {
                continue;
            }
            let g = match &node.op {
                Op::Leaf => continue,
                _ => match grads[idx].take() {
                    Some(g) => g,
                    None => continue,
                },
            };
            match &node.op {
                Op::Leaf => unreachable!(),
                Op::MatMul(a, b) => {
                    if self.needs(*a) {
                        let da = g.matmul_transposed(self.value(*b))?;
                        accumulate(&mut grads, *a, da);
                    }
                    if self.needs(*b) {
                        let db = self.value(*a).transposed_matmul(&g)?;
                        accumulate(&mut grads, *b, db);
                    }
                }
                Op::SpMM(s, d) => {
                    accumulate(&mut grads, *d, s.spmm(&g)?);
                }
                Op::Add(a, b) => {
                    if self.needs(*a) && self.needs(*b) {
                        accumulate(&mut grads, *a, g.clone());
                        accumulate(&mut grads, *b, g);
                    } else if self.needs(*a) {
                        accumulate(&mut grads, *a, g);
                    } else {
                        accumulate(&mut grads, *b, g);
                    }
                }
                Op::AddRow(x, bias) => {
                    if self.needs(*bias) {
                        let mut db = Matrix::zeros(1, g.cols());
                        for r in 0..g.rows() {
                            for (acc, &v) in db.row_mut(0).iter_mut().zip(g.row(r)) {
                                *acc += v;
                            }
                        }
                        accumulate(&mut grads, *bias, db);
                    }
                    if self.needs(*x) {
                        accumulate(&mut grads, *x, g);
                    }
                }
                Op::Relu(x) => {
                    let mut dx = g;
                    for (d, &v) in dx.data_mut().iter_mut().zip(self.value(*x).data()) {
                        if v <= T::zero() {
                            *d = T::zero();
                        }
                    }
                    accumulate(&mut grads, *x, dx);
                }
                Op::Tanh(x) => {
                    let mut dx = g;
                    for (d, &y) in dx.data_mut().iter_mut().zip(node.value.data()) {
                        *d *= T::one() - y * y;
                    }
                    accumulate(&mut grads, *x, dx);
                }
                Op::Gather(x, ids) => {
                    let src = self.value(*x);
                    let mut dx = Matrix::zeros(src.rows(), src.cols());
                    for (r, &id) in ids.iter().enumerate() {
                        for (acc, &v) in dx.row_mut(id).iter_mut().zip(g.row(r)) {
                            *acc += v;
                        }
                    }
                    accumulate(&mut grads, *x, dx);
                }
                Op::Mse(pred, target) => {
                    let (p, t) = (self.value(*pred), self.value(*target));
                    let count = T::from_usize(p.data().len().max(1)).unwrap();
                    let coeff = lit::<T>(2.0) * g.item() / count;
                    let dp = Matrix::from_vec(
                        p.rows(),
                        p.cols(),
                        p.data()
                            .iter()
                            .zip(t.data())
                            .map(|(&a, &b)| coeff * (a - b))
                            .collect(),
                    )?;
                    if self.needs(*target) {
                        let mut dt = dp.clone();
                        dt.scale(-T::one());
                        accumulate(&mut grads, *target, dt);
                    }
                    if self.needs(*pred) {
                        accumulate(&mut grads, *pred, dp);
                    }
                }
                Op::SumSquares(x) => {
                    let mut dx = self.value(*x).clone();
                    dx.scale(lit::<T>(2.0) * g.item());
                    accumulate(&mut grads, *x, dx);
                }
                Op::Scale(x, s) => {
                    let mut dx = g;
                    dx.scale(*s);
                    accumulate(&mut grads, *x, dx);
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn accumulate<T: Scalar>(grads: &mut [Option<Matrix<T>>], v: Var, g: Matrix<T>) {
    match &mut grads[v.0] {
        Some(acc) => acc.add_assign(&g),
        slot @ None => *slot = Some(g),
    }
}

/// Gradients produced by [`Tape::backward`]; only leaf gradients are kept.
pub struct Gradients<T> {
    grads: Vec<Option<Matrix<T>>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn get(&self, v: Var) -> Option<&Matrix<T>> {
        self.grads.get(v.0).and_then(|g| g.as_ref())
    }

    pub fn take(&mut self, v: Var) -> Option<Matrix<T>> {
        self.grads.get_mut(v.0).and_then(|g| g.take())
    }
}

/// Mean squared error between `pred` and `target`.
pub fn mse_loss<T: Scalar>(tape: &mut Tape<'_, T>, pred: Var, target: Var) -> Result<Var> {
    tape.mse(pred, target)
}

/// Sum of squared entries over every matrix in `params` (no 1/2 factor).
pub fn l2_regularization<T: Scalar>(tape: &mut Tape<'_, T>, params: &[Var]) -> Result<Var> {
    let mut total: Option<Var> = None;
    for &p in params {
        let sq = tape.sum_squares(p);
        total = Some(match total {
            Some(t) => tape.add(t, sq)?,
            None => sq,
        });
    }
    Ok(total.unwrap_or_else(|| tape.constant(Matrix::scalar(T::zero()))))
}

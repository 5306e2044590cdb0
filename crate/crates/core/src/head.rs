//! Batch row selection and the four-layer regression head.

use crate::autodiff::{l2_regularization, Tape, Var};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::ParamSpec;
use crate::scalar::Scalar;

/// `W^F1..W^F3` are `F x F`; `W^F4` is `F x 1` so each node gets one value.
pub fn param_specs(embed_dim: usize) -> Vec<ParamSpec> {
    let f = embed_dim;
    vec![
        ParamSpec::weight("head.wf1", f, f),
        ParamSpec::weight("head.wf2", f, f),
        ParamSpec::weight("head.wf3", f, f),
        ParamSpec::weight("head.wf4", f, 1),
    ]
}

/// Rows `ids` of `h`; the gather form of the one-hot product `I_D H`.
pub fn select_rows<T: Scalar>(h: &Matrix<T>, ids: &[usize]) -> Result<Matrix<T>> {
    let cols = h.cols();
    let mut data = Vec::with_capacity(ids.len() * cols);
    for &i in ids {
        if i >= h.rows() {
            return Err(Error::NodeOutOfRange { id: i, n: h.rows() });
        }
        data.extend_from_slice(h.row(i));
    }
    Matrix::from_vec(ids.len(), cols, data)
}

pub fn select_rows_on_tape<T: Scalar>(tape: &mut Tape<'_, T>, h: Var, ids: &[usize]) -> Result<Var> {
    tape.gather_rows(h, ids)
}

fn check_head<M>(weights: &[M]) -> Result<()> {
    if weights.len() != 4 {
        return Err(Error::shape("head", format!("expected 4 weights, got {}", weights.len())));
    }
    Ok(())
}

/// `Y = relu(relu(relu(H_D W1) W2) W3) W4`; the output is linear.
pub fn head_forward<T: Scalar>(hd: &Matrix<T>, weights: &[Matrix<T>]) -> Result<Matrix<T>> {
    check_head(weights)?;
    let mut x = hd.matmul(&weights[0])?.relu();
    x = x.matmul(&weights[1])?.relu();
    x = x.matmul(&weights[2])?.relu();
    x.matmul(&weights[3])
}

pub fn head_on_tape<T: Scalar>(tape: &mut Tape<'_, T>, hd: Var, weights: &[Var]) -> Result<Var> {
    check_head(weights)?;
    let mut x = hd;
    for &w in &weights[..3] {
        let z = tape.matmul(x, w)?;
        x = tape.relu(z);
    }
    tape.matmul(x, weights[3])
}

/// `MSE(pred, targets) + lambda * sum ||W||^2` over `regularized`.
pub fn training_loss<T: Scalar>(
    tape: &mut Tape<'_, T>,
    pred: Var,
    targets: Var,
    regularized: &[Var],
    lambda: T,
) -> Result<Var> {
    let mse = tape.mse(pred, targets)?;
    if lambda == T::zero() {
        return Ok(mse);
    }
    let l2 = l2_regularization(tape, regularized)?;
    let reg = tape.scale(l2, lambda);
    tape.add(mse, reg)
}

//! Comparison model: a fully connected tanh network over the degree and
//! eigenvector ranks of each node.

use crate::autodiff::{Tape, Var};
use crate::centrality::{eigenvector_centrality, normalize_ranks, PowerIterationOptions};
use crate::error::{Error, Result};
use crate::graph::{degree_vector, Graph};
use crate::linalg::Matrix;
use crate::model::ParamSpec;
use crate::scalar::Scalar;

/// Widths of the hidden layers.
pub const BASELINE_HIDDEN: [usize; 4] = [20; 4];

/// Input width: degree rank and eigenvector rank.
pub const BASELINE_INPUTS: usize = 2;

/// `mlp.w1, mlp.b1, ..., mlp.w4, mlp.b4, mlp.w5`: hidden layers carry biases,
/// the linear output layer does not.
pub fn param_specs() -> Vec<ParamSpec> {
    let mut specs = Vec::new();
    let mut fan_in = BASELINE_INPUTS;
    for (i, &width) in BASELINE_HIDDEN.iter().enumerate() {
        specs.push(ParamSpec::weight(format!("mlp.w{}", i + 1), fan_in, width));
        specs.push(ParamSpec::bias(format!("mlp.b{}", i + 1), width));
        fan_in = width;
    }
    specs.push(ParamSpec::weight(
        format!("mlp.w{}", BASELINE_HIDDEN.len() + 1),
        fan_in,
        1,
    ));
    specs
}

/// `N x 2` matrix of `2r - 1` for the degree rank and the eigenvector rank.
pub fn baseline_features<T: Scalar>(g: &Graph, eig: &PowerIterationOptions) -> Result<Matrix<T>> {
    let degree = normalize_ranks(degree_vector(g).values());
    let eigen = eigenvector_centrality(g, eig)?;
    let eigen = normalize_ranks(eigen.vector.values());
    let to_signed = |r: f64| T::from_f64_lossy(2.0 * r - 1.0);
    Ok(Matrix::from_fn(g.n(), BASELINE_INPUTS, |i, c| {
        if c == 0 {
            to_signed(degree.values()[i])
        } else {
            to_signed(eigen.values()[i])
        }
    }))
}

fn check_params<M>(params: &[M]) -> Result<()> {
    let expected = 2 * BASELINE_HIDDEN.len() + 1;
    if params.len() != expected {
        return Err(Error::shape(
            "baseline",
            format!("expected {expected} parameter matrices, got {}", params.len()),
        ));
    }
    Ok(())
}

/// Four `tanh(x W + b)` layers followed by a linear output.
pub fn baseline_forward<T: Scalar>(x: &Matrix<T>, params: &[Matrix<T>]) -> Result<Matrix<T>> {
    check_params(params)?;
    let mut h = x.clone();
    for layer in params[..2 * BASELINE_HIDDEN.len()].chunks(2) {
        h = h.matmul(&layer[0])?.add_row(&layer[1])?;
        h.map_inplace(|v| v.tanh());
    }
    h.matmul(&params[2 * BASELINE_HIDDEN.len()])
}

pub fn forward_on_tape<T: Scalar>(tape: &mut Tape<'_, T>, x: Var, params: &[Var]) -> Result<Var> {
    check_params(params)?;
    let mut h = x;
    for layer in params[..2 * BASELINE_HIDDEN.len()].chunks(2) {
        let z = tape.matmul(h, layer[0])?;
        let z = tape.add_row(z, layer[1])?;
        h = tape.tanh(z);
    }
    tape.matmul(h, params[2 * BASELINE_HIDDEN.len()])
}

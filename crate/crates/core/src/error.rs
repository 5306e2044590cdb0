use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("graph is disconnected ({components} components); take the largest component first")]
    Disconnected { components: usize },

    #[error("power iteration did not converge after {iterations} iterations (last delta {delta:e})")]
    NoConvergence { iterations: usize, delta: f64 },

    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("node id {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("centrality kind mismatch: model trained for {trained}, requested {requested}")]
    KindMismatch {
        trained: String,
        requested: String,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("non-finite loss at step {step} (batch {batch}, graph {graph}): {loss}")]
    NonFiniteLoss {
        step: u64,
        batch: u64,
        graph: usize,
        loss: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            op,
            detail: detail.into(),
        }
    }
}

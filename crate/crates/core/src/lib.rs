//! Node centrality approximation with graph embeddings.
//!
//! Exact centralities (degree, eigenvector, closeness, harmonic,
//! betweenness) provide training targets; small neural models learn to
//! predict each node's normalized rank from graph structure alone.

pub mod autodiff;
pub mod baseline;
pub mod centrality;
pub mod checkpoint;
pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod head;
pub mod linalg;
pub mod model;
pub mod optim;
pub mod scalar;
pub mod train;

pub use checkpoint::Checkpoint;
pub use centrality::{CentralityKind, CentralityVector, PowerIterationOptions, RankVector};
pub use embed::{EmbedderConfig, EmbedderKind, GraphInput};
pub use error::{Error, Result};
pub use eval::{kendall_tau_b, EvalReport, Predictor, SetKind, TestSet, TestSetConfig};
pub use graph::{Graph, GeneratorSpec, Topology, TopologyFamily};
pub use linalg::{Matrix, SparseMatrix};
pub use model::{Model, ModelConfig, ModelKind, Params};
pub use scalar::Scalar;
pub use train::{Precision, TrainConfig, TrainingSet};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Model64 = Model<f64>;
pub type Model32 = Model<f32>;
pub type Tape64<'a> = autodiff::Tape<'a, f64>;
pub type Tape32<'a> = autodiff::Tape<'a, f32>;

//! Node embedders: GCN and Structure2Vec.
//!
//! Both map a graph and its `N x C` feature matrix to an `N x F` embedding
//! and are interchangeable in front of the regression head. Each has an
//! eager form for inference and a taped form for training; the two evaluate
//! the same operations in the same order and agree bit for bit.

use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Var};
use crate::centrality::{normalize_ranks, PowerIterationOptions};
use crate::error::{Error, Result};
use crate::graph::{degree_vector, Graph};
use crate::linalg::{Matrix, SparseMatrix};
use crate::model::ParamSpec;
use crate::scalar::Scalar;

/// `N x C` node features; here the single column is the degree rank.
pub type FeatureMatrix<T> = Matrix<T>;

/// `N x F` node embeddings.
pub type EmbeddingMatrix<T> = Matrix<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedderKind {
    Gcn,
    S2v,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedderConfig {
    pub kind: EmbedderKind,
    pub layers: usize,
    pub feature_dim: usize,
    pub embed_dim: usize,
}

/// Everything a model needs from one graph, computed once and reused for
/// every batch drawn from it.
#[derive(Debug, Clone)]
pub struct GraphInput<T> {
    pub n: usize,
    /// `D~^{-1/2}(A + I)D~^{-1/2}` for GCN, plain `A` for Structure2Vec,
    /// absent for the baseline.
    pub adjacency: Option<SparseMatrix<T>>,
    pub features: FeatureMatrix<T>,
    /// Raw degree column `d` (`N x 1`).
    pub degrees: Matrix<T>,
}

impl<T: Scalar> GraphInput<T> {
    pub fn for_embedder(kind: EmbedderKind, g: &Graph) -> Self {
        let degree = degree_vector(g);
        let features = Matrix::column(
            normalize_ranks(degree.values())
                .into_values()
                .into_iter()
                .map(T::from_f64_lossy)
                .collect(),
        );
        let degrees = Matrix::column(degree.values().iter().map(|&d| T::from_f64_lossy(d)).collect());
        let adjacency = match kind {
            EmbedderKind::Gcn => normalized_adjacency(g),
            EmbedderKind::S2v => SparseMatrix::adjacency(g),
        };
        GraphInput {
            n: g.n(),
            adjacency: Some(adjacency),
            features,
            degrees,
        }
    }

    /// Baseline features: degree and eigenvector ranks mapped to `[-1, 1]`.
    pub fn for_baseline(g: &Graph, eig: &PowerIterationOptions) -> Result<Self> {
        let features = crate::baseline::baseline_features(g, eig)?;
        let degree = degree_vector(g);
        Ok(GraphInput {
            n: g.n(),
            adjacency: None,
            features,
            degrees: Matrix::column(degree.values().iter().map(|&d| T::from_f64_lossy(d)).collect()),
        })
    }

    fn adjacency(&self) -> Result<&SparseMatrix<T>> {
        self.adjacency
            .as_ref()
            .ok_or_else(|| Error::shape("embed", "graph input has no adjacency operator"))
    }
}

/// Symmetric normalized adjacency with self-loops, used by the GCN.
pub fn normalized_adjacency<T: Scalar>(g: &Graph) -> SparseMatrix<T> {
    SparseMatrix::normalized_adjacency(g)
}

pub fn param_specs(cfg: &EmbedderConfig) -> Vec<ParamSpec> {
    let (c, f) = (cfg.feature_dim, cfg.embed_dim);
    match cfg.kind {
        EmbedderKind::Gcn => (1..=cfg.layers)
            .map(|l| ParamSpec::weight(format!("gcn.w{l}"), if l == 1 { c } else { f }, f))
            .collect(),
        EmbedderKind::S2v => vec![
            ParamSpec::weight("s2v.w1", 1, f),
            ParamSpec::weight("s2v.w2", f, f),
            ParamSpec::weight("s2v.w3", c, f),
        ],
    }
}

pub fn param_count(cfg: &EmbedderConfig) -> usize {
    match cfg.kind {
        EmbedderKind::Gcn => cfg.layers,
        EmbedderKind::S2v => 3,
    }
}

fn check_weights<M>(cfg: &EmbedderConfig, weights: &[M]) -> Result<()> {
    if weights.len() != param_count(cfg) {
        return Err(Error::shape(
            "embed",
            format!("{:?} expects {} weight matrices, got {}", cfg.kind, param_count(cfg), weights.len()),
        ));
    }
    Ok(())
}

/// `H^{l+1} = relu(Â H^l W^{l+1})` starting from `H^0 = F_M`.
pub fn gcn_forward<T: Scalar>(
    norm_adj: &SparseMatrix<T>,
    features: &FeatureMatrix<T>,
    weights: &[Matrix<T>],
) -> Result<EmbeddingMatrix<T>> {
    let mut h = features.clone();
    for w in weights {
        h = norm_adj.spmm(&h)?.matmul(w)?.relu();
    }
    Ok(h)
}

/// Structure2Vec with weights `[W1 (1xF), W2 (FxF), W3 (CxF)]`:
/// `X = d W1 + F_M W3`, `H^0 = relu(X)`, then `layers` times
/// `H <- relu(A H W2 + X)`.
pub fn s2v_forward<T: Scalar>(
    adj: &SparseMatrix<T>,
    features: &FeatureMatrix<T>,
    degrees: &Matrix<T>,
    weights: &[Matrix<T>],
    layers: usize,
) -> Result<EmbeddingMatrix<T>> {
    let [w1, w2, w3] = weights else {
        return Err(Error::shape("s2v_forward", format!("expected 3 weights, got {}", weights.len())));
    };
    let injected = degrees.matmul(w1)?.add(&features.matmul(w3)?)?;
    let mut h = injected.relu();
    for _ in 0..layers {
        let mut pre = adj.spmm(&h)?.matmul(w2)?;
        pre.add_assign(&injected);
        h = pre.relu();
    }
    Ok(h)
}

/// Eager embedding of a prepared graph.
pub fn embed<T: Scalar>(
    cfg: &EmbedderConfig,
    input: &GraphInput<T>,
    weights: &[Matrix<T>],
) -> Result<EmbeddingMatrix<T>> {
    check_weights(cfg, weights)?;
    let adj = input.adjacency()?;
    match cfg.kind {
        EmbedderKind::Gcn => gcn_forward(adj, &input.features, weights),
        EmbedderKind::S2v => s2v_forward(adj, &input.features, &input.degrees, weights, cfg.layers),
    }
}

/// Taped embedding; `weights` are the tape handles of the embedder params.
pub fn embed_on_tape<'a, T: Scalar>(
    cfg: &EmbedderConfig,
    tape: &mut Tape<'a, T>,
    input: &'a GraphInput<T>,
    weights: &[Var],
) -> Result<Var> {
    check_weights(cfg, weights)?;
    let adj = input.adjacency()?;
    let features = tape.constant(input.features.clone());
    match cfg.kind {
        EmbedderKind::Gcn => {
            let mut h = features;
            for &w in weights {
                let ah = tape.spmm(adj, h)?;
                let z = tape.matmul(ah, w)?;
                h = tape.relu(z);
            }
            Ok(h)
        }
        EmbedderKind::S2v => {
            let (w1, w2, w3) = (weights[0], weights[1], weights[2]);
            let degrees = tape.constant(input.degrees.clone());
            let x1 = tape.matmul(degrees, w1)?;
            let x3 = tape.matmul(features, w3)?;
            let injected = tape.add(x1, x3)?;
            let mut h = tape.relu(injected);
            for _ in 0..cfg.layers {
                let ah = tape.spmm(adj, h)?;
                let z = tape.matmul(ah, w2)?;
                let pre = tape.add(z, injected)?;
                h = tape.relu(pre);
            }
            Ok(h)
        }
    }
}

/// Common interface over the embedders: graph in, embedding out.
pub trait Embedder<T: Scalar> {
    fn config(&self) -> &EmbedderConfig;

    fn embed_graph(&self, g: &Graph, weights: &[Matrix<T>]) -> Result<EmbeddingMatrix<T>> {
        let input = GraphInput::for_embedder(self.config().kind, g);
        embed(self.config(), &input, weights)
    }
}

impl<T: Scalar> Embedder<T> for EmbedderConfig {
    fn config(&self) -> &EmbedderConfig {
        self
    }
}

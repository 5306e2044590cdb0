//! Model kinds, named parameter sets and the unified predictor.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Var};
use crate::baseline;
use crate::centrality::PowerIterationOptions;
use crate::embed::{self, EmbedderConfig, EmbedderKind, GraphInput};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::head;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Graph-embedding model with a GCN embedder.
    Gcn,
    /// Graph-embedding model with a Structure2Vec embedder.
    S2v,
    /// Degree and eigenvector ranks through a tanh MLP.
    Baseline,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Gcn, ModelKind::S2v, ModelKind::Baseline];

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Gcn => "gcn",
            ModelKind::S2v => "s2v",
            ModelKind::Baseline => "baseline",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            ModelKind::Gcn => 0,
            ModelKind::S2v => 1,
            ModelKind::Baseline => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn embedder(&self) -> Option<EmbedderKind> {
        match self {
            ModelKind::Gcn => Some(EmbedderKind::Gcn),
            ModelKind::S2v => Some(EmbedderKind::S2v),
            ModelKind::Baseline => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcn" => Ok(ModelKind::Gcn),
            "s2v" | "structure2vec" => Ok(ModelKind::S2v),
            "baseline" => Ok(ModelKind::Baseline),
            other => Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        }
    }
}

/// Architecture hyperparameters. `layers`, `feature_dim` and `embed_dim`
/// only apply to the embedding models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub layers: usize,
    pub feature_dim: usize,
    pub embed_dim: usize,
}

impl ModelConfig {
    pub fn new(kind: ModelKind) -> Self {
        ModelConfig {
            kind,
            layers: 2,
            feature_dim: if kind == ModelKind::Baseline { 2 } else { 1 },
            embed_dim: 128,
        }
    }

    pub fn with_embed_dim(mut self, f: usize) -> Self {
        self.embed_dim = f;
        self
    }

    pub fn with_layers(mut self, l: usize) -> Self {
        self.layers = l;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == ModelKind::Baseline {
            if self.feature_dim != 2 {
                return Err(Error::InvalidParameter(
                    "baseline takes exactly two input features".into(),
                ));
            }
            return Ok(());
        }
        if self.layers < 1 || self.embed_dim < 1 {
            return Err(Error::InvalidParameter(format!(
                "need layers >= 1 and embed_dim >= 1, got {} and {}",
                self.layers, self.embed_dim
            )));
        }
        if self.feature_dim != 1 {
            return Err(Error::InvalidParameter(
                "embedding models use the single degree-rank feature (C = 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn embedder_config(&self) -> Option<EmbedderConfig> {
        self.kind.embedder().map(|kind| EmbedderConfig {
            kind,
            layers: self.layers,
            feature_dim: self.feature_dim,
            embed_dim: self.embed_dim,
        })
    }

    /// Names, shapes and roles of every trainable matrix, in storage order.
    pub fn param_specs(&self) -> Vec<ParamSpec> {
        match self.embedder_config() {
            Some(ec) => {
                let mut specs = embed::param_specs(&ec);
                specs.extend(head::param_specs(self.embed_dim));
                specs
            }
            None => baseline::param_specs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    /// Weight matrix: Glorot-uniform init, included in the L2 term.
    Weight,
    /// Bias row: zero init, not regularized.
    Bias,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub role: ParamRole,
}

impl ParamSpec {
    pub fn weight(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        ParamSpec {
            name: name.into(),
            rows,
            cols,
            role: ParamRole::Weight,
        }
    }

    pub fn bias(name: impl Into<String>, cols: usize) -> Self {
        ParamSpec {
            name: name.into(),
            rows: 1,
            cols,
            role: ParamRole::Bias,
        }
    }

    /// Glorot-uniform half-width `sqrt(6 / (fan_in + fan_out))`.
    pub fn glorot_bound(&self) -> f64 {
        (6.0 / (self.rows + self.cols) as f64).sqrt()
    }
}

/// Trainable matrices in the order given by [`ModelConfig::param_specs`].
#[derive(Debug, Clone, PartialEq)]
pub struct Params<T> {
    pub specs: Vec<ParamSpec>,
    pub values: Vec<Matrix<T>>,
}

impl<T: Scalar> Params<T> {
    /// Glorot-uniform weights and zero biases, deterministic per seed.
    pub fn init(config: &ModelConfig, seed: u64) -> Self {
        let specs = config.param_specs();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = specs
            .iter()
            .map(|s| match s.role {
                ParamRole::Weight => {
                    let bound = s.glorot_bound();
                    Matrix::from_fn(s.rows, s.cols, |_, _| {
                        T::from_f64_lossy(rng.gen_range(-bound..=bound))
                    })
                }
                ParamRole::Bias => Matrix::zeros(s.rows, s.cols),
            })
            .collect();
        Params { specs, values }
    }

    pub fn zeros(config: &ModelConfig) -> Self {
        let specs = config.param_specs();
        let values = specs.iter().map(|s| Matrix::zeros(s.rows, s.cols)).collect();
        Params { specs, values }
    }

    pub fn get(&self, name: &str) -> Option<&Matrix<T>> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .map(|i| &self.values[i])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Matrix<T>> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .map(move |i| &mut self.values[i])
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.values.iter().map(|v| v.shape()).collect()
    }

    /// Checks that `values` agree with `specs`.
    pub fn check(&self) -> Result<()> {
        if self.specs.len() != self.values.len() {
            return Err(Error::shape(
                "params",
                format!("{} specs but {} values", self.specs.len(), self.values.len()),
            ));
        }
        for (s, v) in self.specs.iter().zip(&self.values) {
            if v.shape() != (s.rows, s.cols) {
                return Err(Error::shape(
                    "params",
                    format!("{} expects {}x{}, got {:?}", s.name, s.rows, s.cols, v.shape()),
                ));
            }
        }
        Ok(())
    }

    /// Pushes every matrix onto the tape as a trainable leaf.
    pub fn on_tape<'a>(&self, tape: &mut Tape<'a, T>) -> Vec<Var> {
        self.values.iter().map(|v| tape.param(v.clone())).collect()
    }

    /// The subset of `vars` that enters the L2 term.
    pub fn regularized(&self, vars: &[Var]) -> Vec<Var> {
        self.specs
            .iter()
            .zip(vars)
            .filter(|(s, _)| s.role == ParamRole::Weight)
            .map(|(_, &v)| v)
            .collect()
    }
}

/// A model architecture with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub config: ModelConfig,
    pub params: Params<T>,
}

impl<T: Scalar> Model<T> {
    pub fn init(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        Ok(Model {
            config,
            params: Params::init(&config, seed),
        })
    }

    pub fn from_params(config: ModelConfig, params: Params<T>) -> Result<Self> {
        config.validate()?;
        let expected = config.param_specs();
        if expected != params.specs {
            let names: Vec<_> = params.specs.iter().map(|s| s.name.as_str()).collect();
            return Err(Error::shape(
                "model",
                format!("{} model does not match parameters {names:?}", config.kind),
            ));
        }
        params.check()?;
        Ok(Model { config, params })
    }

    /// Per-graph inputs: cached adjacency operator plus node features.
    pub fn prepare(&self, g: &Graph, eig: &PowerIterationOptions) -> Result<GraphInput<T>> {
        match self.config.kind.embedder() {
            Some(kind) => Ok(GraphInput::for_embedder(kind, g)),
            None => GraphInput::for_baseline(g, eig),
        }
    }

    /// Maps a normalized target rank in `[0, 1]` to the model's output scale.
    pub fn encode_target(&self, rank: f64) -> T {
        match self.config.kind {
            ModelKind::Baseline => T::from_f64_lossy(2.0 * rank - 1.0),
            _ => T::from_f64_lossy(rank),
        }
    }

    /// Inverse of [`Model::encode_target`].
    pub fn decode_output(&self, out: T) -> f64 {
        match self.config.kind {
            ModelKind::Baseline => (out.to_f64_lossless() + 1.0) / 2.0,
            _ => out.to_f64_lossless(),
        }
    }

    /// Records the forward pass for nodes `ids`, returning a `(B, 1)` value.
    pub fn forward_on_tape<'a>(
        &self,
        tape: &mut Tape<'a, T>,
        input: &'a GraphInput<T>,
        weights: &[Var],
        ids: &[usize],
    ) -> Result<Var> {
        match self.config.embedder_config() {
            Some(ec) => {
                let split = embed::param_count(&ec);
                let h = embed::embed_on_tape(&ec, tape, input, &weights[..split])?;
                let hd = head::select_rows_on_tape(tape, h, ids)?;
                head::head_on_tape(tape, hd, &weights[split..])
            }
            None => {
                let x = tape.constant(input.features.clone());
                let xd = tape.gather_rows(x, ids)?;
                baseline::forward_on_tape(tape, xd, weights)
            }
        }
    }

    /// Raw outputs for every node, without recording a tape.
    pub fn predict(&self, input: &GraphInput<T>) -> Result<Vec<T>> {
        let out = match self.config.embedder_config() {
            Some(ec) => {
                let split = embed::param_count(&ec);
                let h = embed::embed(&ec, input, &self.params.values[..split])?;
                head::head_forward(&h, &self.params.values[split..])?
            }
            None => baseline::baseline_forward(&input.features, &self.params.values)?,
        };
        Ok(out.into_data())
    }

    /// Predicted ranks on the `[0, 1]` scale (not clamped).
    pub fn predict_ranks(&self, input: &GraphInput<T>) -> Result<Vec<f64>> {
        Ok(self
            .predict(input)?
            .into_iter()
            .map(|v| self.decode_output(v))
            .collect())
    }
}

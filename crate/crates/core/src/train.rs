//! Training-set construction and the per-graph batched training loop.
//!
//! A step is one node. Every batch is drawn from a single graph, the
//! learning rate decays once per batch, and the whole loop state (weights,
//! Adam moments, visit order and RNG position) is checkpointable so a
//! resumed run continues with the same loss sequence.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::autodiff::Tape;
use crate::centrality::{compute_with, CentralityKind, PowerIterationOptions, RankVector};
use crate::checkpoint::{AdamSnapshot, Checkpoint, NamedMatrix, RngSnapshot};
use crate::embed::GraphInput;
use crate::error::{Error, Result};
use crate::graph::{generate, GeneratorSpec, Graph, Topology};
use crate::head;
use crate::linalg::Matrix;
use crate::model::{Model, ModelConfig, ModelKind, Params};
use crate::optim::{clip_gradients, AdamConfig, AdamState};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn as_str(&self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            Precision::F32 => 0,
            Precision::F64 => 1,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Precision::F32),
            1 => Some(Precision::F64),
            _ => None,
        }
    }

    fn of<T: Scalar>() -> Self {
        if T::NAME == "f32" {
            Precision::F32
        } else {
            Precision::F64
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" | "32" => Ok(Precision::F32),
            "f64" | "64" => Ok(Precision::F64),
            other => Err(Error::InvalidParameter(format!("unknown precision {other:?}"))),
        }
    }
}

/// Everything that determines a training run.
///
/// `steps` counts nodes, so a batch of `batch_size` nodes advances it by
/// `batch_size`; the learning rate decays as `lr <- max(lr * lr_decay,
/// min_lr)` once per batch. `data_seed` fixes the training graphs and
/// `seed` fixes initialization and visit order, so retraining with a new
/// `seed` reuses the same dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub centrality: CentralityKind,
    /// Embedder depth (ignored by the baseline).
    pub layers: usize,
    /// Embedding width `F` (ignored by the baseline).
    pub embed_dim: usize,
    pub n_graphs: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Edges added per node by the scale-free generator.
    pub sf_m: usize,
    pub steps: u64,
    pub lr: f64,
    pub lr_decay: f64,
    pub min_lr: f64,
    pub l2: f64,
    pub batch_size: usize,
    /// Gradients are clipped elementwise to `[-clip, clip]`.
    pub clip: f64,
    pub adam: AdamConfig,
    pub seed: u64,
    pub data_seed: u64,
    pub precision: Precision,
    pub eigen: PowerIterationOptions,
    pub checkpoint_path: Option<PathBuf>,
    pub checkpoint_interval: u64,
    pub log_interval: u64,
}

impl TrainConfig {
    /// Full-scale defaults for `model`.
    pub fn new(model: ModelKind, centrality: CentralityKind) -> Self {
        let (lr, l2, steps) = match model {
            ModelKind::Gcn => (0.001, 0.01, 4_000_000),
            ModelKind::S2v => (0.001, 0.1, 4_000_000),
            ModelKind::Baseline => (0.01, 0.001, 1_000_000),
        };
        TrainConfig {
            model,
            centrality,
            layers: 2,
            embed_dim: 128,
            n_graphs: 1000,
            min_nodes: 100,
            max_nodes: 1000,
            sf_m: Topology::DEFAULT_SF_M,
            steps,
            lr,
            lr_decay: 0.999,
            min_lr: 1e-4,
            l2,
            batch_size: 128,
            clip: 1.0,
            adam: AdamConfig::default(),
            seed: 0,
            data_seed: 0,
            precision: Precision::F64,
            eigen: PowerIterationOptions::default(),
            checkpoint_path: None,
            checkpoint_interval: 50_000,
            log_interval: 10_000,
        }
    }

    /// 100 graphs of 100 to 300 nodes and 500k steps.
    pub fn desk(model: ModelKind, centrality: CentralityKind) -> Self {
        TrainConfig {
            n_graphs: 100,
            min_nodes: 100,
            max_nodes: 300,
            steps: 500_000,
            ..Self::new(model, centrality)
        }
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig::new(self.model)
            .with_layers(self.layers)
            .with_embed_dim(self.embed_dim)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        self.model_config().validate()?;
        if !(self.min_lr > 0.0 && self.min_lr <= self.lr) {
            return bad(format!("need 0 < min_lr <= lr, got min_lr={} lr={}", self.min_lr, self.lr));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return bad(format!("lr_decay must lie in (0, 1], got {}", self.lr_decay));
        }
        if self.batch_size < 1 || self.steps < 1 || self.n_graphs < 1 {
            return bad("batch_size, steps and n_graphs must be at least 1".into());
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) || self.clip.is_nan() || self.clip <= 0.0 {
            return bad(format!("need l2 >= 0 and clip > 0, got {} and {}", self.l2, self.clip));
        }
        if self.min_nodes > self.max_nodes || self.min_nodes <= self.sf_m || self.sf_m < 1 {
            return bad(format!(
                "need 1 <= sf_m < min_nodes <= max_nodes, got sf_m={} range {}..={}",
                self.sf_m, self.min_nodes, self.max_nodes
            ));
        }
        if self.checkpoint_interval < 1 || self.log_interval < 1 {
            return bad("checkpoint_interval and log_interval must be at least 1".into());
        }
        Ok(())
    }

    /// Deviations from the defaults for `self.model` that the caller
    /// should be warned about.
    pub fn overrides(&self) -> Vec<String> {
        let d = Self::new(self.model, self.centrality);
        let mut out = Vec::new();
        if self.model != ModelKind::Baseline {
            if self.layers != d.layers {
                out.push(format!("layers = {} (default {})", self.layers, d.layers));
            }
            if self.embed_dim != d.embed_dim {
                out.push(format!("embed_dim = {} (default {})", self.embed_dim, d.embed_dim));
            }
        }
        for (name, v, dv) in [
            ("lr", self.lr, d.lr),
            ("lr_decay", self.lr_decay, d.lr_decay),
            ("min_lr", self.min_lr, d.min_lr),
            ("l2", self.l2, d.l2),
        ] {
            if v != dv {
                out.push(format!("{name} = {v} (default {dv})"));
            }
        }
        if self.batch_size != d.batch_size {
            out.push(format!("batch_size = {} (default {})", self.batch_size, d.batch_size));
        }
        out
    }
}

/// One learning-rate decay step.
pub fn next_lr(lr: f64, decay: f64, min_lr: f64) -> f64 {
    (lr * decay).max(min_lr)
}

#[derive(Debug, Clone)]
pub struct TrainingGraph {
    pub spec: GeneratorSpec,
    pub graph: Graph,
    pub targets: RankVector,
}

/// Training graphs with their exact target ranks, computed once.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub centrality: CentralityKind,
    pub graphs: Vec<TrainingGraph>,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn total_nodes(&self) -> usize {
        self.graphs.iter().map(|g| g.graph.n()).sum()
    }

    /// SHA-256 over the edge lists and targets.
    pub fn fingerprint(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update([self.centrality.code()]);
        h.update((self.graphs.len() as u64).to_le_bytes());
        for tg in &self.graphs {
            h.update((tg.graph.n() as u64).to_le_bytes());
            for (u, v) in tg.graph.edges() {
                h.update((u as u64).to_le_bytes());
                h.update((v as u64).to_le_bytes());
            }
            for r in tg.targets.values() {
                h.update(r.to_le_bytes());
            }
        }
        h.finalize().into()
    }
}

/// Generator specs for the training graphs: scale-free, sizes uniform in
/// `[min_nodes, max_nodes]`, all drawn from `data_seed`.
pub fn training_specs(config: &TrainConfig) -> Vec<GeneratorSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.data_seed);
    (0..config.n_graphs)
        .map(|_| {
            let n = rng.gen_range(config.min_nodes..=config.max_nodes);
            let seed = rng.gen();
            GeneratorSpec::new(Topology::ScaleFree { m: config.sf_m }, n, seed)
        })
        .collect()
}

pub fn build_training_set(config: &TrainConfig) -> Result<TrainingSet> {
    config.validate()?;
    let graphs = training_specs(config)
        .into_par_iter()
        .map(|spec| {
            let graph = generate(&spec)?;
            let targets = compute_with(config.centrality, &graph, &config.eigen)?.ranks();
            Ok(TrainingGraph { spec, graph, targets })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainingSet {
        centrality: config.centrality,
        graphs,
    })
}

/// Position in the seeded visit order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cursor {
    /// Number of passes over the dataset started so far.
    pub epoch: u64,
    pub graph_order: Vec<u32>,
    /// Index into `graph_order` of the next graph to visit.
    pub graph_pos: usize,
    /// Graph currently being batched.
    pub graph: u32,
    pub node_order: Vec<u32>,
    pub node_pos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchRecord {
    /// Steps completed after this batch.
    pub step: u64,
    pub batch: u64,
    pub graph: usize,
    pub size: usize,
    /// Loss before the update, regularization included.
    pub loss: f64,
    /// Learning rate used for the update.
    pub lr: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub trace: Vec<BatchRecord>,
}

pub struct Trainer<'d, T> {
    config: TrainConfig,
    data: &'d TrainingSet,
    fingerprint: [u8; 32],
    model: Model<T>,
    inputs: Vec<GraphInput<T>>,
    targets: Vec<Vec<T>>,
    adam: AdamState<T>,
    rng: ChaCha8Rng,
    cursor: Cursor,
    step: u64,
    batches: u64,
    lr: f64,
    trace: Vec<BatchRecord>,
}

impl<'d, T: Scalar> Trainer<'d, T> {
    pub fn new(config: TrainConfig, data: &'d TrainingSet) -> Result<Self> {
        config.validate()?;
        let model = Model::init(config.model_config(), config.seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(1);
        let adam = AdamState::new(config.adam, model.params.shapes());
        let lr = config.lr;
        Self::assemble(config, data, model, adam, rng, Cursor::default(), 0, 0, lr)
    }

    /// Continues the run stored in `ckpt`. `data` must be the dataset the
    /// checkpoint was trained on.
    pub fn resume(ckpt: &Checkpoint, data: &'d TrainingSet) -> Result<Self> {
        let config = ckpt.config.clone();
        config.validate()?;
        let params: Params<T> = ckpt.params_for(&config.model_config())?;
        let model = Model::from_params(config.model_config(), params)?;
        let adam = ckpt.adam.restore(&model.params.shapes())?;
        Self::assemble(
            config,
            data,
            model,
            adam,
            ckpt.rng.restore(),
            ckpt.cursor.clone(),
            ckpt.step,
            ckpt.batches,
            ckpt.lr,
        )
        .and_then(|t| {
            if t.fingerprint != ckpt.dataset_hash {
                return Err(Error::Checkpoint(
                    "training set differs from the one the checkpoint was trained on".into(),
                ));
            }
            t.check_cursor()?;
            Ok(t)
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        config: TrainConfig,
        data: &'d TrainingSet,
        model: Model<T>,
        adam: AdamState<T>,
        rng: ChaCha8Rng,
        cursor: Cursor,
        step: u64,
        batches: u64,
        lr: f64,
    ) -> Result<Self> {
        if Precision::of::<T>() != config.precision {
            return Err(Error::InvalidParameter(format!(
                "config asks for {} but the trainer runs in {}",
                config.precision,
                T::NAME
            )));
        }
        if data.centrality != config.centrality {
            return Err(Error::KindMismatch {
                trained: data.centrality.to_string(),
                requested: config.centrality.to_string(),
            });
        }
        if data.is_empty() {
            return Err(Error::InvalidParameter("training set is empty".into()));
        }
        let inputs = data
            .graphs
            .par_iter()
            .map(|tg| model.prepare(&tg.graph, &config.eigen))
            .collect::<Result<Vec<_>>>()?;
        let targets = data
            .graphs
            .iter()
            .map(|tg| tg.targets.values().iter().map(|&r| model.encode_target(r)).collect())
            .collect();
        Ok(Trainer {
            fingerprint: data.fingerprint(),
            config,
            data,
            model,
            inputs,
            targets,
            adam,
            rng,
            cursor,
            step,
            batches,
            lr,
            trace: Vec::new(),
        })
    }

    fn check_cursor(&self) -> Result<()> {
        let c = &self.cursor;
        let g = self.data.len();
        let ok = c.graph_order.iter().all(|&i| (i as usize) < g)
            && c.graph_pos <= c.graph_order.len()
            && c.node_pos <= c.node_order.len()
            && (c.node_order.is_empty()
                || ((c.graph as usize) < g
                    && c.node_order.len() == self.data.graphs[c.graph as usize].graph.n()));
        if ok {
            Ok(())
        } else {
            Err(Error::Checkpoint("visit cursor does not fit the training set".into()))
        }
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn lr(&self) -> f64 {
        self.lr
    }

    /// Batches processed by this trainer instance (not those before a resume).
    pub fn trace(&self) -> &[BatchRecord] {
        &self.trace
    }

    fn next_batch(&mut self, max_size: usize) -> (usize, Vec<usize>) {
        let c = &mut self.cursor;
        if c.node_pos >= c.node_order.len() {
            if c.graph_pos >= c.graph_order.len() {
                c.graph_order = (0..self.data.len() as u32).collect();
                c.graph_order.shuffle(&mut self.rng);
                c.graph_pos = 0;
                c.epoch += 1;
            }
            c.graph = c.graph_order[c.graph_pos];
            c.graph_pos += 1;
            let n = self.data.graphs[c.graph as usize].graph.n();
            c.node_order = (0..n as u32).collect();
            c.node_order.shuffle(&mut self.rng);
            c.node_pos = 0;
        }
        let end = (c.node_pos + max_size.min(self.config.batch_size)).min(c.node_order.len());
        let ids = c.node_order[c.node_pos..end].iter().map(|&i| i as usize).collect();
        c.node_pos = end;
        (c.graph as usize, ids)
    }

    /// Processes one batch of at most `max_size` nodes.
    fn train_batch(&mut self, max_size: usize) -> Result<BatchRecord> {
        let (g, ids) = self.next_batch(max_size);
        let target = Matrix::column(ids.iter().map(|&i| self.targets[g][i]).collect());
        let (loss, mut grads) = {
            let mut tape = Tape::new();
            let vars = self.model.params.on_tape(&mut tape);
            let pred = self.model.forward_on_tape(&mut tape, &self.inputs[g], &vars, &ids)?;
            let target = tape.constant(target);
            let reg = self.model.params.regularized(&vars);
            let lambda = T::from_f64_lossy(self.config.l2);
            let loss = head::training_loss(&mut tape, pred, target, &reg, lambda)?;
            let value = tape.value(loss).item().to_f64_lossless();
            if !value.is_finite() {
                return Err(Error::NonFiniteLoss {
                    step: self.step,
                    batch: self.batches,
                    graph: g,
                    loss: value,
                });
            }
            let mut grads = tape.backward(loss)?;
            let grads: Vec<Matrix<T>> = vars
                .iter()
                .zip(&self.model.params.values)
                .map(|(&v, p)| grads.take(v).unwrap_or_else(|| Matrix::zeros(p.rows(), p.cols())))
                .collect();
            (value, grads)
        };
        let clip = T::from_f64_lossy(self.config.clip);
        clip_gradients(&mut grads, -clip, clip);
        let lr = self.lr;
        self.adam
            .step(&mut self.model.params.values, &grads, T::from_f64_lossy(lr))?;
        self.step += ids.len() as u64;
        self.batches += 1;
        self.lr = next_lr(lr, self.config.lr_decay, self.config.min_lr);
        Ok(BatchRecord {
            step: self.step,
            batch: self.batches,
            graph: g,
            size: ids.len(),
            loss,
            lr,
        })
    }

    /// Trains until at least `until` steps have been processed, writing
    /// periodic checkpoints and a final one if a checkpoint path is
    /// configured. Batches are only shortened to land exactly on the
    /// configured total (or on `until` when that lies beyond it), so
    /// stopping early and resuming reproduces the uninterrupted run.
    pub fn run_to(&mut self, until: u64) -> Result<()> {
        let interval = self.config.checkpoint_interval;
        let log_every = self.config.log_interval;
        let limit = self.config.steps.max(until);
        while self.step < until {
            let remaining = usize::try_from(limit - self.step).unwrap_or(usize::MAX);
            let before = self.step;
            let rec = self.train_batch(remaining)?;
            if before / log_every != rec.step / log_every {
                log::info!(
                    "step {} batch {} loss {:.6e} lr {:.6e}",
                    rec.step,
                    rec.batch,
                    rec.loss,
                    rec.lr
                );
            }
            self.trace.push(rec);
            if before / interval != rec.step / interval && rec.step < until {
                self.save_checkpoint()?;
            }
        }
        self.save_checkpoint()
    }

    /// Trains until the configured number of steps.
    pub fn run(&mut self) -> Result<()> {
        self.run_to(self.config.steps)
    }

    fn save_checkpoint(&self) -> Result<()> {
        if let Some(path) = &self.config.checkpoint_path {
            self.checkpoint().save(path)?;
            log::debug!("checkpoint at step {} written to {}", self.step, path.display());
        }
        Ok(())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            config: self.config.clone(),
            dataset_hash: self.fingerprint,
            step: self.step,
            batches: self.batches,
            lr: self.lr,
            params: self
                .model
                .params
                .specs
                .iter()
                .zip(&self.model.params.values)
                .map(|(s, v)| NamedMatrix {
                    name: s.name.clone(),
                    matrix: v.to_f64(),
                })
                .collect(),
            adam: AdamSnapshot::capture(&self.adam),
            rng: RngSnapshot::capture(&self.rng),
            cursor: self.cursor.clone(),
        }
    }

    /// Mean squared error of the current model over every training node,
    /// on the model's output scale, without regularization.
    pub fn dataset_loss(&self) -> Result<f64> {
        let mut total = 0.0;
        let mut count = 0usize;
        for (input, targets) in self.inputs.iter().zip(&self.targets) {
            let pred = self.model.predict(input)?;
            for (p, t) in pred.iter().zip(targets) {
                let d = (*p - *t).to_f64_lossless();
                total += d * d;
            }
            count += pred.len();
        }
        Ok(total / count as f64)
    }

    pub fn into_outcome(self) -> TrainOutcome {
        TrainOutcome {
            checkpoint: self.checkpoint(),
            trace: self.trace,
        }
    }
}

/// Builds the training set and trains to `config.steps`.
pub fn train(config: &TrainConfig) -> Result<TrainOutcome> {
    let data = build_training_set(config)?;
    train_on(config, &data)
}

pub fn train_on(config: &TrainConfig, data: &TrainingSet) -> Result<TrainOutcome> {
    fn go<T: Scalar>(config: &TrainConfig, data: &TrainingSet) -> Result<TrainOutcome> {
        let mut t = Trainer::<T>::new(config.clone(), data)?;
        t.run()?;
        Ok(t.into_outcome())
    }
    match config.precision {
        Precision::F32 => go::<f32>(config, data),
        Precision::F64 => go::<f64>(config, data),
    }
}

/// Continues `ckpt` until `until` steps.
pub fn resume_on(ckpt: &Checkpoint, data: &TrainingSet, until: u64) -> Result<TrainOutcome> {
    fn go<T: Scalar>(ckpt: &Checkpoint, data: &TrainingSet, until: u64) -> Result<TrainOutcome> {
        let mut t = Trainer::<T>::resume(ckpt, data)?;
        t.run_to(until)?;
        Ok(t.into_outcome())
    }
    match ckpt.config.precision {
        Precision::F32 => go::<f32>(ckpt, data, until),
        Precision::F64 => go::<f64>(ckpt, data, until),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(model: ModelKind) -> TrainConfig {
        TrainConfig {
            n_graphs: 4,
            min_nodes: 20,
            max_nodes: 40,
            embed_dim: 8,
            batch_size: 16,
            steps: 400,
            ..TrainConfig::new(model, CentralityKind::Degree)
        }
    }

    #[test]
    fn table_defaults() {
        let s2v = TrainConfig::new(ModelKind::S2v, CentralityKind::Closeness);
        assert_eq!((s2v.lr, s2v.lr_decay, s2v.min_lr, s2v.l2), (0.001, 0.999, 1e-4, 0.1));
        assert_eq!((s2v.embed_dim, s2v.batch_size, s2v.steps), (128, 128, 4_000_000));
        assert_eq!(s2v.model_config().feature_dim, 1);
        let gcn = TrainConfig::new(ModelKind::Gcn, CentralityKind::Closeness);
        assert_eq!(gcn.l2, 0.01);
        let base = TrainConfig::new(ModelKind::Baseline, CentralityKind::Closeness);
        assert_eq!((base.lr, base.l2, base.steps), (0.01, 0.001, 1_000_000));
        assert_eq!(base.model_config().feature_dim, 2);
        assert!(s2v.overrides().is_empty());
        let mut deep = gcn.clone();
        deep.layers = 3;
        assert_eq!(deep.overrides(), vec!["layers = 3 (default 2)".to_string()]);
    }

    #[test]
    fn validation() {
        let ok = tiny(ModelKind::Gcn);
        assert!(ok.validate().is_ok());
        for broken in [
            TrainConfig { min_lr: 0.0, ..ok.clone() },
            TrainConfig { min_lr: 0.01, ..ok.clone() },
            TrainConfig { lr_decay: 0.0, ..ok.clone() },
            TrainConfig { lr_decay: 1.5, ..ok.clone() },
            TrainConfig { batch_size: 0, ..ok.clone() },
            TrainConfig { steps: 0, ..ok.clone() },
            TrainConfig { min_nodes: 50, max_nodes: 40, ..ok.clone() },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
        assert!(TrainConfig { lr_decay: 1.0, ..ok }.validate().is_ok());
    }

    #[test]
    fn decay_matches_closed_form() {
        let mut lr = 0.001;
        for _ in 0..1000 {
            lr = next_lr(lr, 0.999, 1e-4);
        }
        let closed = 0.001 * 0.999f64.powi(1000);
        assert!((lr - closed).abs() < 1e-15);
        assert!((lr - 3.677e-4).abs() < 1e-7);

        let mut lr = 0.001;
        for _ in 0..10_000 {
            lr = next_lr(lr, 0.999, 1e-4);
            assert!(lr >= 1e-4);
        }
        assert_eq!(lr, 1e-4);
        assert_eq!(next_lr(0.01, 1.0, 1e-4), 0.01);
    }

    #[test]
    fn dataset_is_deterministic_and_in_range() {
        let cfg = tiny(ModelKind::Gcn);
        let a = build_training_set(&cfg).unwrap();
        let b = build_training_set(&cfg).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert!(a.graphs.iter().all(|g| (20..=40).contains(&g.graph.n())));
        let other = build_training_set(&TrainConfig { data_seed: 1, ..cfg.clone() }).unwrap();
        assert_ne!(a.fingerprint(), other.fingerprint());
        let reseeded = build_training_set(&TrainConfig { seed: 9, ..cfg }).unwrap();
        assert_eq!(a.fingerprint(), reseeded.fingerprint());
    }

    #[test]
    fn steps_count_nodes_and_batches_stay_in_one_graph() {
        let cfg = TrainConfig { steps: 150, ..tiny(ModelKind::S2v) };
        let data = build_training_set(&cfg).unwrap();
        let mut t = Trainer::<f64>::new(cfg, &data).unwrap();
        t.run().unwrap();
        assert_eq!(t.step(), 150);
        let trace = t.trace();
        assert_eq!(trace.iter().map(|r| r.size as u64).sum::<u64>(), 150);
        assert!(trace.iter().all(|r| r.size <= 16));
        assert_eq!(trace.last().unwrap().step, 150);
        for w in trace.windows(2) {
            assert!(w[1].lr <= w[0].lr);
        }
    }

    #[test]
    fn every_node_visited_once_per_epoch() {
        let cfg = tiny(ModelKind::Gcn);
        let data = build_training_set(&cfg).unwrap();
        let total = data.total_nodes() as u64;
        let mut t = Trainer::<f64>::new(TrainConfig { steps: total, ..cfg }, &data).unwrap();
        let mut seen = vec![Vec::new(); data.len()];
        while t.step < total {
            let (g, ids) = t.next_batch(usize::MAX);
            t.step += ids.len() as u64;
            seen[g].extend(ids);
        }
        for (g, mut ids) in seen.into_iter().enumerate() {
            ids.sort_unstable();
            assert_eq!(ids, (0..data.graphs[g].graph.n()).collect::<Vec<_>>());
        }
        assert_eq!(t.cursor.epoch, 1);
    }

    #[test]
    fn f32_trainer_runs() {
        let cfg = TrainConfig { precision: Precision::F32, steps: 64, ..tiny(ModelKind::Gcn) };
        let data = build_training_set(&cfg).unwrap();
        let out = train_on(&cfg, &data).unwrap();
        assert_eq!(out.checkpoint.step, 64);
        assert!(Trainer::<f64>::new(cfg, &data).is_err());
    }

    #[test]
    fn centrality_mismatch_is_rejected() {
        let cfg = tiny(ModelKind::Baseline);
        let data = build_training_set(&cfg).unwrap();
        let other = TrainConfig { centrality: CentralityKind::Harmonic, ..cfg };
        assert!(matches!(
            Trainer::<f64>::new(other, &data),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn exploding_learning_rate_reports_non_finite_loss() {
        let cfg = TrainConfig {
            lr: 1e300,
            min_lr: 1e300,
            lr_decay: 1.0,
            clip: 1e300,
            steps: 2000,
            ..tiny(ModelKind::Baseline)
        };
        let data = build_training_set(&cfg).unwrap();
        let err = train_on(&cfg, &data).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { .. }), "{err}");
    }
}

//! Optional TOML run configuration. Every key can also be given as a flag;
//! flags win over the file, the file wins over the built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub evaluate: EvalSection,
    #[serde(default)]
    pub bench: BenchSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub model: Option<String>,
    pub centrality: Option<String>,
    pub layers: Option<usize>,
    pub embed_dim: Option<usize>,
    pub n_graphs: Option<usize>,
    pub min_nodes: Option<usize>,
    pub max_nodes: Option<usize>,
    pub sf_m: Option<usize>,
    pub steps: Option<u64>,
    pub lr: Option<f64>,
    pub lr_decay: Option<f64>,
    pub min_lr: Option<f64>,
    pub l2: Option<f64>,
    pub batch_size: Option<usize>,
    pub clip: Option<f64>,
    pub seed: Option<u64>,
    pub data_seed: Option<u64>,
    pub precision: Option<String>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: Option<u64>,
    pub log_interval: Option<u64>,
    pub eigen_tol: Option<f64>,
    pub eigen_max_iter: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    pub sets: Option<Vec<String>>,
    pub graphs_per_set: Option<usize>,
    pub min_nodes: Option<usize>,
    pub max_nodes: Option<usize>,
    pub seed: Option<u64>,
    pub tau_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    pub repeats: Option<usize>,
    pub ladder: Option<Vec<usize>>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

//! Versioned binary checkpoints. The byte layout is described in
//! `docs/checkpoint-format.md`.

use std::fs;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use rand::SeedableRng;

use crate::centrality::CentralityKind;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{Model, ModelConfig, ModelKind, Params};
use crate::optim::{AdamConfig, AdamState};
use crate::scalar::Scalar;
use crate::train::{Cursor, Precision, TrainConfig};

pub const MAGIC: &[u8; 8] = b"NCAGECKP";
pub const VERSION: u32 = 1;
const DIGEST_LEN: usize = 32;
const HEADER_LEN: usize = 8 + 4 + 4;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: Matrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdamSnapshot {
    pub config: AdamConfig,
    pub t: u64,
    pub m: Vec<Matrix<f64>>,
    pub v: Vec<Matrix<f64>>,
}

impl AdamSnapshot {
    pub fn capture<T: Scalar>(state: &AdamState<T>) -> Self {
        AdamSnapshot {
            config: state.config,
            t: state.t,
            m: state.m.iter().map(Matrix::to_f64).collect(),
            v: state.v.iter().map(Matrix::to_f64).collect(),
        }
    }

    pub fn restore<T: Scalar>(&self, shapes: &[(usize, usize)]) -> Result<AdamState<T>> {
        let fits = |ms: &[Matrix<f64>]| {
            ms.len() == shapes.len() && ms.iter().zip(shapes).all(|(m, &s)| m.shape() == s)
        };
        if !fits(&self.m) || !fits(&self.v) {
            return Err(Error::shape("checkpoint", "Adam moments do not match the parameters"));
        }
        Ok(AdamState {
            config: self.config,
            t: self.t,
            m: self.m.iter().map(Matrix::from_f64).collect(),
            v: self.v.iter().map(Matrix::from_f64).collect(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSnapshot {
    pub seed: [u8; 32],
    pub stream: u64,
    pub word_pos: u128,
}

impl RngSnapshot {
    pub fn capture(rng: &ChaCha8Rng) -> Self {
        RngSnapshot {
            seed: rng.get_seed(),
            stream: rng.get_stream(),
            word_pos: rng.get_word_pos(),
        }
    }

    pub fn restore(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }
}

/// Complete training state at a step boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: TrainConfig,
    /// Fingerprint of the training set, checked on resume.
    pub dataset_hash: [u8; 32],
    pub step: u64,
    pub batches: u64,
    /// Learning rate for the next batch.
    pub lr: f64,
    pub params: Vec<NamedMatrix>,
    pub adam: AdamSnapshot,
    pub rng: RngSnapshot,
    pub cursor: Cursor,
}

impl Checkpoint {
    pub fn model_kind(&self) -> ModelKind {
        self.config.model
    }

    pub fn centrality(&self) -> CentralityKind {
        self.config.centrality
    }

    /// Parameters checked against `config`'s architecture.
    pub fn params_for<T: Scalar>(&self, config: &ModelConfig) -> Result<Params<T>> {
        let specs = config.param_specs();
        if specs.len() != self.params.len() {
            return Err(Error::shape(
                "checkpoint",
                format!(
                    "{} model expects {} matrices, checkpoint holds {}",
                    config.kind,
                    specs.len(),
                    self.params.len()
                ),
            ));
        }
        for (s, p) in specs.iter().zip(&self.params) {
            if s.name != p.name || (s.rows, s.cols) != p.matrix.shape() {
                return Err(Error::shape(
                    "checkpoint",
                    format!(
                        "{} model expects {} of {}x{}, checkpoint holds {} of {:?}",
                        config.kind,
                        s.name,
                        s.rows,
                        s.cols,
                        p.name,
                        p.matrix.shape()
                    ),
                ));
            }
        }
        Ok(Params {
            specs,
            values: self.params.iter().map(|p| Matrix::from_f64(&p.matrix)).collect(),
        })
    }

    pub fn model<T: Scalar>(&self) -> Result<Model<T>> {
        let config = self.config.model_config();
        Model::from_params(config, self.params_for(&config)?)
    }

    /// Fails with [`Error::KindMismatch`] unless the checkpoint was trained
    /// for `requested` or `allow_mismatch` is set.
    pub fn check_centrality(&self, requested: CentralityKind, allow_mismatch: bool) -> Result<()> {
        if requested != self.centrality() && !allow_mismatch {
            return Err(Error::KindMismatch {
                trained: self.centrality().to_string(),
                requested: requested.to_string(),
            });
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = Vec::new();
        w.extend_from_slice(MAGIC);
        put_u32(&mut w, VERSION);
        w.push(self.config.model.code());
        w.push(self.config.centrality.code());
        w.push(self.config.precision.code());
        w.push(0);
        let json = serde_json::to_vec(&self.config)
            .map_err(|e| Error::Checkpoint(format!("cannot encode config: {e}")))?;
        put_bytes(&mut w, &json);
        w.extend_from_slice(&self.dataset_hash);
        put_u64(&mut w, self.step);
        put_u64(&mut w, self.batches);
        put_f64(&mut w, self.lr);

        put_u32(&mut w, self.params.len() as u32);
        for p in &self.params {
            put_block(&mut w, &p.name, &p.matrix);
        }

        let a = &self.adam;
        put_f64(&mut w, a.config.beta1);
        put_f64(&mut w, a.config.beta2);
        put_f64(&mut w, a.config.eps);
        put_u64(&mut w, a.t);
        put_u32(&mut w, a.m.len() as u32);
        for (i, (m, v)) in a.m.iter().zip(&a.v).enumerate() {
            let name = self.params.get(i).map_or("", |p| p.name.as_str());
            put_block(&mut w, name, m);
            put_block(&mut w, name, v);
        }

        w.extend_from_slice(&self.rng.seed);
        put_u64(&mut w, self.rng.stream);
        w.extend_from_slice(&self.rng.word_pos.to_le_bytes());

        let c = &self.cursor;
        put_u64(&mut w, c.epoch);
        put_u32(&mut w, c.graph);
        put_u64(&mut w, c.graph_pos as u64);
        put_u64(&mut w, c.node_pos as u64);
        put_u32s(&mut w, &c.graph_order);
        put_u32s(&mut w, &c.node_order);

        let digest = Sha256::digest(&w);
        w.extend_from_slice(&digest);
        Ok(w)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file (bad magic bytes)".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported format version {version} (this build reads version {VERSION})"
            )));
        }
        if bytes.len() < HEADER_LEN + DIGEST_LEN {
            return Err(Error::Checkpoint("file is truncated".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::Checkpoint(
                "checksum mismatch: file is truncated or corrupt".into(),
            ));
        }

        let mut r = Reader { buf: body, pos: 12 };
        let model = ModelKind::from_code(r.u8()?)
            .ok_or_else(|| Error::Checkpoint("unknown model kind".into()))?;
        let centrality = CentralityKind::from_code(r.u8()?)
            .ok_or_else(|| Error::Checkpoint("unknown centrality kind".into()))?;
        let precision = Precision::from_code(r.u8()?)
            .ok_or_else(|| Error::Checkpoint("unknown precision".into()))?;
        r.u8()?;
        let config: TrainConfig = serde_json::from_slice(r.bytes()?)
            .map_err(|e| Error::Checkpoint(format!("bad config block: {e}")))?;
        if (config.model, config.centrality, config.precision) != (model, centrality, precision) {
            return Err(Error::Checkpoint("header disagrees with config block".into()));
        }
        let dataset_hash = r.array::<32>()?;
        let step = r.u64()?;
        let batches = r.u64()?;
        let lr = r.f64()?;

        let count = r.u32()? as usize;
        let mut params = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let (name, matrix) = r.block()?;
            params.push(NamedMatrix { name, matrix });
        }

        let adam_config = AdamConfig {
            beta1: r.f64()?,
            beta2: r.f64()?,
            eps: r.f64()?,
        };
        let t = r.u64()?;
        let moments = r.u32()? as usize;
        let (mut m, mut v) = (Vec::new(), Vec::new());
        for _ in 0..moments {
            m.push(r.block()?.1);
            v.push(r.block()?.1);
        }

        let rng = RngSnapshot {
            seed: r.array::<32>()?,
            stream: r.u64()?,
            word_pos: u128::from_le_bytes(r.array::<16>()?),
        };
        let epoch = r.u64()?;
        let graph = r.u32()?;
        let graph_pos = r.usize()?;
        let node_pos = r.usize()?;
        let graph_order = r.u32s()?;
        let node_order = r.u32s()?;
        if r.pos != body.len() {
            return Err(Error::Checkpoint(format!(
                "{} unexpected trailing bytes",
                body.len() - r.pos
            )));
        }

        let ckpt = Checkpoint {
            config,
            dataset_hash,
            step,
            batches,
            lr,
            params,
            adam: AdamSnapshot {
                config: adam_config,
                t,
                m,
                v,
            },
            rng,
            cursor: Cursor {
                epoch,
                graph_order,
                graph_pos,
                graph,
                node_order,
                node_pos,
            },
        };
        let params = ckpt.params_for::<f64>(&ckpt.config.model_config())?;
        ckpt.adam.restore::<f64>(&params.shapes())?;
        Ok(ckpt)
    }

    /// Writes through a temporary file and renames it into place.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let bytes = self.to_bytes()?;
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, &bytes)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }

    /// Hex SHA-256 of the serialized checkpoint.
    pub fn digest(&self) -> Result<String> {
        Ok(hex(&Sha256::digest(self.to_bytes()?)))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn put_u32(w: &mut Vec<u8>, v: u32) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(w: &mut Vec<u8>, v: u64) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(w: &mut Vec<u8>, v: f64) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_bytes(w: &mut Vec<u8>, b: &[u8]) {
    put_u32(w, b.len() as u32);
    w.extend_from_slice(b);
}

fn put_u32s(w: &mut Vec<u8>, vs: &[u32]) {
    put_u32(w, vs.len() as u32);
    for &v in vs {
        put_u32(w, v);
    }
}

fn put_block(w: &mut Vec<u8>, name: &str, m: &Matrix<f64>) {
    put_bytes(w, name.as_bytes());
    put_u32(w, m.rows() as u32);
    put_u32(w, m.cols() as u32);
    for &x in m.data() {
        put_f64(w, x);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::Checkpoint("index overflows usize".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.array()?))
    }

    fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn u32s(&mut self) -> Result<Vec<u32>> {
        let n = self.u32()? as usize;
        let raw = self.take(n.checked_mul(4).ok_or_else(|| Error::Checkpoint("bad length".into()))?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }

    fn block(&mut self) -> Result<(String, Matrix<f64>)> {
        let name = String::from_utf8(self.bytes()?.to_vec())
            .map_err(|_| Error::Checkpoint("block name is not UTF-8".into()))?;
        let rows = self.u32()? as usize;
        let cols = self.u32()? as usize;
        let len = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Checkpoint(format!("block {name} has an absurd shape")))?;
        let raw = self.take(len)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok((name, Matrix::from_vec(rows, cols, data)?))
    }
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ncage_core::centrality::{compute_with, CentralityKind, PowerIterationOptions};
use ncage_core::eval::{
    self, bench_inference, build_test_set, linear_fit, test_set_specs, Predictor, SetKind,
    TestGraph, TestSet, TestSetConfig, BENCH_CSV_HEADER,
};
use ncage_core::graph::{
    generate as gen_graph, largest_component, load_edge_list, save_edge_list, GeneratorSpec,
    Topology,
};
use ncage_core::train::{build_training_set, BatchRecord, Trainer};
use ncage_core::{Checkpoint, ModelKind, Precision, Scalar, TrainConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{BenchSection, EvalSection, TrainSection};
use crate::{BenchArgs, CentralityArgs, CliError, EvaluateArgs, GenerateArgs, PredictArgs, TrainArgs};

const VERSION: &str = env!("CARGO_PKG_VERSION");

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse<T: std::str::FromStr<Err = ncage_core::Error>>(s: &str) -> CliResult<T> {
    s.parse().map_err(CliError::from)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reproducibility header on stderr.
fn header(command: &str, config: &impl Serialize, extra: &[(&str, String)]) {
    eprintln!("# ncage {VERSION} {command}");
    eprintln!(
        "# config {}",
        serde_json::to_string(config).unwrap_or_else(|e| format!("<unserializable: {e}>"))
    );
    for (k, v) in extra {
        eprintln!("# {k} {v}");
    }
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub topology: String,
    pub count: usize,
    pub min_n: usize,
    pub max_n: usize,
    pub seed: u64,
    pub graphs: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: usize,
    pub file: String,
    pub spec: GeneratorSpec,
    pub nodes: usize,
    pub edges: usize,
}

pub fn generate(a: &GenerateArgs) -> CliResult {
    if a.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let kind: SetKind = parse(&a.topology)?;
    let cfg = TestSetConfig {
        graphs_per_set: a.count,
        min_nodes: a.min_n,
        max_nodes: a.max_n,
        seed: a.seed,
    };
    if cfg.min_nodes < 5 || cfg.min_nodes > cfg.max_nodes {
        return Err(usage(format!("need 5 <= min-n <= max-n, got {}..={}", a.min_n, a.max_n)));
    }
    header("generate", &cfg_json(&cfg), &[("seed", a.seed.to_string())]);
    fs::create_dir_all(&a.out)?;
    let width = (a.count - 1).to_string().len().max(4);
    let mut graphs = Vec::with_capacity(a.count);
    for (id, spec) in test_set_specs(kind, &cfg).into_iter().enumerate() {
        let g = gen_graph(&spec)?;
        let file = format!("graph_{id:0width$}.txt");
        save_edge_list(&g, a.out.join(&file))?;
        graphs.push(ManifestEntry {
            id,
            file,
            spec,
            nodes: g.n(),
            edges: g.num_edges(),
        });
    }
    let manifest = Manifest {
        generator: format!("ncage {VERSION}"),
        topology: kind.to_string(),
        count: a.count,
        min_n: a.min_n,
        max_n: a.max_n,
        seed: a.seed,
        graphs,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let path = a.out.join("manifest.json");
    fs::write(&path, &text)?;
    println!("wrote {} graphs to {}", a.count, a.out.display());
    println!("manifest sha256 {}", hex(&Sha256::digest(text.as_bytes())));
    Ok(())
}

fn cfg_json(cfg: &TestSetConfig) -> serde_json::Value {
    serde_json::json!({
        "graphs_per_set": cfg.graphs_per_set,
        "min_nodes": cfg.min_nodes,
        "max_nodes": cfg.max_nodes,
        "seed": cfg.seed,
    })
}

pub fn centrality(a: &CentralityArgs) -> CliResult {
    let kind: CentralityKind = parse(&a.kind)?;
    let loaded = load_edge_list(&a.graph)?;
    let (graph, ids) = if a.largest_component {
        let (g, keep) = ncage_core::graph::largest_component_with_ids(&loaded.graph);
        (g, keep.into_iter().map(|i| loaded.original_ids[i]).collect())
    } else {
        (loaded.graph, loaded.original_ids)
    };
    let values = compute_with(kind, &graph, &PowerIterationOptions::default())?;
    let ranks = values.ranks();
    let mut out = String::from("node_id,value,rank\n");
    for ((id, v), r) in ids.iter().zip(values.values()).zip(ranks.values()) {
        out.push_str(&format!("{id},{v},{r}\n"));
    }
    write_output(a.out.as_deref(), &out)
}

/// Defaults for the model, then the config file, then flags.
pub fn resolve_train_config(a: &TrainArgs, file: &TrainSection) -> CliResult<TrainConfig> {
    macro_rules! pick {
        ($field:ident) => {
            a.$field.clone().or_else(|| file.$field.clone())
        };
    }
    let model: ModelKind = parse(&pick!(model).ok_or_else(|| usage("--model is required"))?)?;
    let centrality: CentralityKind =
        parse(&pick!(centrality).ok_or_else(|| usage("--centrality is required"))?)?;
    let mut c = TrainConfig::new(model, centrality);
    macro_rules! set {
        ($($field:ident),*) => {
            $(if let Some(v) = pick!($field) { c.$field = v; })*
        };
    }
    set!(layers, embed_dim, n_graphs, min_nodes, max_nodes, sf_m, steps, lr, lr_decay, min_lr, l2,
        batch_size, clip, seed, data_seed, checkpoint_interval, log_interval);
    if let Some(p) = pick!(precision) {
        c.precision = parse::<Precision>(&p)?;
    }
    if let Some(t) = pick!(eigen_tol) {
        c.eigen.tol = t;
    }
    if let Some(m) = pick!(eigen_max_iter) {
        c.eigen.max_iter = m;
    }
    c.checkpoint_path = Some(pick!(checkpoint).unwrap_or_else(|| PathBuf::from("model.ckpt")));
    c.validate()?;
    Ok(c)
}

fn write_trace(path: &Path, trace: &[BatchRecord]) -> CliResult {
    let mut out = String::from("step,batch,graph,size,loss,lr\n");
    for r in trace {
        out.push_str(&format!(
            "{},{},{},{},{:e},{:e}\n",
            r.step, r.batch, r.graph, r.size, r.loss, r.lr
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn train(a: &TrainArgs, file: &TrainSection) -> CliResult {
    let (config, resume) = match &a.resume {
        Some(path) => {
            let ckpt = Checkpoint::load(path)?;
            let mut config = ckpt.config.clone();
            if let Some(s) = a.steps.or(file.steps) {
                config.steps = s;
            }
            if let Some(p) = a.checkpoint.clone().or_else(|| file.checkpoint.clone()) {
                config.checkpoint_path = Some(p);
            }
            (config, Some(ckpt))
        }
        None => (resolve_train_config(a, file)?, None),
    };
    for o in config.overrides() {
        log::warn!("overriding default: {o}");
    }
    header(
        "train",
        &config,
        &[("seed", config.seed.to_string()), ("data_seed", config.data_seed.to_string())],
    );
    let data = build_training_set(&config)?;
    log::info!(
        "training set: {} graphs, {} nodes, fingerprint {}",
        data.len(),
        data.total_nodes(),
        hex(&data.fingerprint())
    );
    let until = a.stop_after.map_or(config.steps, |s| s.min(config.steps));
    let trace = match config.precision {
        Precision::F32 => run_training::<f32>(config.clone(), &data, resume.as_ref(), until)?,
        Precision::F64 => run_training::<f64>(config.clone(), &data, resume.as_ref(), until)?,
    };
    if let Some(path) = &a.trace {
        write_trace(path, &trace)?;
    }
    let path = config.checkpoint_path.as_ref().expect("resolved");
    let ckpt = Checkpoint::load(path)?;
    println!(
        "trained {} to step {} (final lr {:.3e}); checkpoint {} sha256 {}",
        config.model,
        ckpt.step,
        ckpt.lr,
        path.display(),
        ckpt.digest()?
    );
    Ok(())
}

fn run_training<T: Scalar>(
    config: TrainConfig,
    data: &ncage_core::TrainingSet,
    resume: Option<&Checkpoint>,
    until: u64,
) -> CliResult<Vec<BatchRecord>> {
    let mut trainer = match resume {
        Some(ckpt) => {
            let mut ckpt = ckpt.clone();
            ckpt.config = config.clone();
            Trainer::<T>::resume(&ckpt, data)?
        }
        None => Trainer::<T>::new(config.clone(), data)?,
    };
    trainer.run_to(until)?;
    Ok(trainer.trace().to_vec())
}

fn load_checkpoint(path: &Path) -> CliResult<(Checkpoint, String)> {
    let ckpt = Checkpoint::load(path)?;
    let digest = ckpt.digest()?;
    Ok((ckpt, digest))
}

pub fn predict(a: &PredictArgs) -> CliResult {
    let (ckpt, digest) = load_checkpoint(&a.checkpoint)?;
    let requested = match &a.centrality {
        Some(c) => parse(c)?,
        None => ckpt.centrality(),
    };
    ckpt.check_centrality(requested, a.allow_kind_mismatch)?;
    header("predict", &ckpt.config, &[("checkpoint_sha256", digest)]);
    let loaded = load_edge_list(&a.graph)?;
    let predictor = Predictor::from_checkpoint(&ckpt)?;
    let raw = predictor.predict_ranks(&loaded.graph, &ckpt.config.eigen)?;
    let mut out = String::from("node_id,predicted_rank,raw\n");
    for (id, r) in loaded.original_ids.iter().zip(&raw) {
        out.push_str(&format!("{id},{},{r}\n", r.clamp(0.0, 1.0)));
    }
    write_output(a.out.as_deref(), &out)
}

fn load_manifest_set(path: &Path) -> CliResult<TestSet> {
    let text = fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let kind: SetKind = parse(&manifest.topology)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let graphs = manifest
        .graphs
        .iter()
        .map(|e| {
            let g = load_edge_list(dir.join(&e.file))?.graph;
            Ok(TestGraph {
                id: e.id,
                spec: e.spec,
                graph: largest_component(&g),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(TestSet { kind, graphs })
}

pub fn evaluate(a: &EvaluateArgs, file: &EvalSection) -> CliResult {
    let (ckpt, digest) = load_checkpoint(&a.checkpoint)?;
    let centrality = match &a.centrality {
        Some(c) => parse(c)?,
        None => ckpt.centrality(),
    };
    let cfg = TestSetConfig {
        graphs_per_set: a.graphs_per_set.or(file.graphs_per_set).unwrap_or(100),
        min_nodes: a.min_nodes.or(file.min_nodes).unwrap_or(100),
        max_nodes: a.max_nodes.or(file.max_nodes).unwrap_or(1000),
        seed: a.seed.or(file.seed).unwrap_or(1),
    };
    let floor = a.tau_floor.or(file.tau_floor);
    let sets = match &a.manifest {
        Some(path) => vec![load_manifest_set(path)?],
        None => {
            let names = a
                .sets
                .clone()
                .or_else(|| file.sets.clone())
                .unwrap_or_else(|| SetKind::ALL.iter().map(|k| k.to_string()).collect());
            names
                .iter()
                .map(|n| Ok(build_test_set(parse(n.trim())?, &cfg)?))
                .collect::<CliResult<Vec<_>>>()?
        }
    };
    let mut resolved = cfg_json(&cfg);
    resolved["centrality"] = serde_json::json!(centrality);
    resolved["tau_floor"] = serde_json::json!(floor);
    header("evaluate", &resolved, &[("checkpoint_sha256", digest)]);

    let report = eval::evaluate(&ckpt, centrality, &sets, a.allow_kind_mismatch)?;
    if let Some(p) = &a.out_csv {
        fs::write(p, report.to_csv())?;
    }
    if let Some(p) = &a.out_json {
        fs::write(p, report.summary_json() + "\n")?;
    }
    println!("set,graphs,undefined,mean_tau_b,std_tau_b,mean_prep_s,mean_infer_s");
    for s in &report.summaries {
        println!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6}",
            s.set, s.graphs, s.undefined, s.mean_tau_b, s.std_tau_b, s.mean_prep_s, s.mean_infer_s
        );
    }
    if let Some(floor) = floor {
        let failing: Vec<_> = report
            .summaries
            .iter()
            .filter(|s| s.mean_tau_b.is_nan() || s.mean_tau_b < floor)
            .map(|s| format!("{} ({:.4})", s.set, s.mean_tau_b))
            .collect();
        if !failing.is_empty() {
            return Err(CliError::Floor(format!(
                "mean tau-b below floor {floor}: {}",
                failing.join(", ")
            )));
        }
    }
    Ok(())
}

/// Node count of a scale-free graph with `m` edges per new node and
/// (approximately) `edges` edges.
pub fn ladder_nodes(edges: usize, m: usize) -> usize {
    let seed_edges = m * (m - 1) / 2;
    (edges.saturating_sub(seed_edges) / m + m).max(m + 1)
}

pub fn bench(a: &BenchArgs, file: &BenchSection) -> CliResult {
    let (ckpt, digest) = load_checkpoint(&a.checkpoint)?;
    let repeats = a.repeats.or(file.repeats).unwrap_or(5);
    if repeats == 0 {
        return Err(usage("--repeats must be at least 1"));
    }
    let seed = a.seed.or(file.seed).unwrap_or(1);
    let graphs: Vec<(String, ncage_core::Graph)> = if a.graph.is_empty() {
        let ladder = a
            .ladder
            .clone()
            .or_else(|| file.ladder.clone())
            .unwrap_or_else(|| vec![10_000, 20_000, 40_000, 80_000]);
        let m = Topology::DEFAULT_SF_M;
        ladder
            .iter()
            .map(|&e| {
                let spec = GeneratorSpec::new(Topology::scale_free(), ladder_nodes(e, m), seed);
                Ok((format!("sf-{e}"), gen_graph(&spec)?))
            })
            .collect::<CliResult<_>>()?
    } else {
        a.graph
            .iter()
            .map(|p| Ok((p.display().to_string(), load_edge_list(p)?.graph)))
            .collect::<CliResult<_>>()?
    };
    header(
        "bench",
        &serde_json::json!({ "repeats": repeats, "seed": seed, "graphs": graphs.len() }),
        &[("checkpoint_sha256", digest)],
    );
    let predictor = Predictor::from_checkpoint(&ckpt)?;
    let records = bench_inference(&predictor, &graphs, repeats, &ckpt.config.eigen)?;
    let mut out = String::from(BENCH_CSV_HEADER);
    out.push('\n');
    for r in &records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    write_output(a.out.as_deref(), &out)?;
    if records.len() >= 2 {
        let xs: Vec<f64> = records.iter().map(|r| r.m as f64).collect();
        let ys: Vec<f64> = records.iter().map(|r| r.total_mean_s).collect();
        if let Ok(fit) = linear_fit(&xs, &ys) {
            eprintln!(
                "# time vs |E|: slope {:.3e} s/edge, intercept {:.3e} s, r2 {:.4}",
                fit.slope, fit.intercept, fit.r2
            );
        }
    }
    Ok(())
}

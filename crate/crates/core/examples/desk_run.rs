//! Trains one model at desk scale and scores it on the four test sets.
//!
//! Usage: `desk_run [model] [centrality] [steps] [seed] [l2]`

use std::time::Instant;

use ncage_core::eval::{build_test_sets, evaluate, TestSetConfig};
use ncage_core::train::{build_training_set, train_on};
use ncage_core::{CentralityKind, ModelKind, TrainConfig};

fn main() -> ncage_core::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let model: ModelKind = arg(0, "s2v").parse()?;
    let centrality: CentralityKind = arg(1, "closeness").parse()?;
    let mut cfg = TrainConfig::desk(model, centrality);
    cfg.steps = arg(2, "500000").parse().expect("steps");
    cfg.seed = arg(3, "0").parse().expect("seed");
    if let Some(l2) = args.get(4) {
        cfg.l2 = l2.parse().expect("l2");
    }

    let t = Instant::now();
    let data = build_training_set(&cfg)?;
    println!("dataset: {} graphs in {:.1}s", data.len(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    let out = train_on(&cfg, &data)?;
    let first = out.trace.first().map_or(f64::NAN, |r| r.loss);
    let last: f64 = out.trace.iter().rev().take(50).map(|r| r.loss).sum::<f64>() / 50.0;
    println!(
        "trained {} steps in {:.1}s, loss {first:.4} -> {last:.4}",
        out.checkpoint.step,
        t.elapsed().as_secs_f64()
    );

    let sets = build_test_sets(&TestSetConfig {
        graphs_per_set: 30,
        min_nodes: 100,
        max_nodes: 300,
        seed: 1000,
    })?;
    let report = evaluate(&out.checkpoint, centrality, &sets, false)?;
    for s in &report.summaries {
        println!("{:>4}: tau_b {:.4} +- {:.4} ({} undefined)", s.set, s.mean_tau_b, s.std_tau_b, s.undefined);
    }
    Ok(())
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ncage(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncage"))
        .args(args)
        .current_dir(dir)
        .env_remove("NCAGE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const TINY_TRAIN: &[&str] = &[
    "train",
    "--model",
    "s2v",
    "--centrality",
    "closeness",
    "--n-graphs",
    "3",
    "--min-nodes",
    "20",
    "--max-nodes",
    "30",
    "--embed-dim",
    "4",
    "--batch-size",
    "8",
    "--steps",
    "200",
    "-q",
];

#[test]
fn generate_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate", "--topology", "sf", "--count", "5", "--min-n", "20", "--max-n", "40", "--seed",
        "1", "--out",
    ];
    let a = ncage(&[&args[..], &["a"]].concat(), dir.path());
    let b = ncage(&[&args[..], &["b"]].concat(), dir.path());
    assert!(a.status.success(), "{}", stderr(&a));
    let hash = |o: &Output| stdout(o).lines().last().unwrap().to_string();
    assert_eq!(hash(&a), hash(&b));
    assert!(hash(&a).starts_with("manifest sha256 "));
    let files = fs::read_dir(dir.path().join("a")).unwrap().count();
    assert_eq!(files, 6);
    assert!(stderr(&a).contains("# ncage"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let zero = ncage(&["generate", "--topology", "sf", "--count", "0"], dir.path());
    assert_eq!(zero.status.code(), Some(1));
    let unknown = ncage(&["frobnicate"], dir.path());
    assert_eq!(unknown.status.code(), Some(1));
    let bad_model = ncage(&["train", "--model", "lstm", "--centrality", "degree"], dir.path());
    assert_eq!(bad_model.status.code(), Some(1));
    let help = ncage(&["--help"], dir.path());
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn config_file_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), "[train]\nlearning_rate = 0.1\n").unwrap();
    let out = ncage(&["--config", "run.toml", "train"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("learning_rate"));
}

#[test]
fn centrality_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p3.txt"), "0 1\n1 2\n").unwrap();
    let out = ncage(&["centrality", "--graph", "p3.txt", "--kind", "betweenness"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out), "node_id,value,rank\n0,0,0.25\n1,1,1\n2,0,0.25\n");

    fs::write(dir.path().join("two.txt"), "0 1\n2 3\n").unwrap();
    let out = ncage(&["centrality", "--graph", "two.txt", "--kind", "closeness"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    fs::write(dir.path().join("bad.txt"), "0 x\n").unwrap();
    let out = ncage(&["centrality", "--graph", "bad.txt", "--kind", "degree"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.txt:1"));
}

#[test]
fn train_predict_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let out = ncage(&[TINY_TRAIN, &["--trace", "trace.csv"]].concat(), p);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("checkpoint model.ckpt sha256"));
    assert!(stderr(&out).contains("\"l2\":0.1"));
    let trace = fs::read_to_string(p.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().last().unwrap().split(',').next(), Some("200"));

    fs::write(p.join("tri.txt"), "# Nodes: 3\n5 6\n6 7\n").unwrap();
    let pred = ncage(&["predict", "--checkpoint", "model.ckpt", "--graph", "tri.txt"], p);
    assert!(pred.status.success(), "{}", stderr(&pred));
    let text = stdout(&pred);
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "node_id,predicted_rank,raw");
    assert_eq!(rows.len(), 4);
    let ids: Vec<_> = rows[1..].iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["5", "6", "7"]);
    for r in &rows[1..] {
        let cols: Vec<f64> = r.split(',').skip(1).map(|c| c.parse().unwrap()).collect();
        if (0.0..=1.0).contains(&cols[1]) {
            assert_eq!(cols[0], cols[1]);
        } else {
            assert_eq!(cols[0], cols[1].clamp(0.0, 1.0));
        }
    }

    let mismatch = ncage(
        &["predict", "--checkpoint", "model.ckpt", "--graph", "tri.txt", "--centrality", "degree"],
        p,
    );
    assert_eq!(mismatch.status.code(), Some(2));
    let allowed = ncage(
        &[
            "predict", "--checkpoint", "model.ckpt", "--graph", "tri.txt", "--centrality",
            "degree", "--allow-kind-mismatch",
        ],
        p,
    );
    assert!(allowed.status.success());

    let eval_args = [
        "evaluate", "--checkpoint", "model.ckpt", "--sets", "sw,sf,rnd,mix", "--graphs-per-set",
        "3", "--min-nodes", "20", "--max-nodes", "30", "--out-csv", "eval.csv", "--out-json",
        "eval.json",
    ];
    let ev = ncage(&eval_args, p);
    assert!(ev.status.success(), "{}", stderr(&ev));
    assert_eq!(stdout(&ev).lines().count(), 5);
    let csv = fs::read_to_string(p.join("eval.csv")).unwrap();
    assert!(csv.starts_with("set,topology,graph_id,n,m,tau_b,prep_s,infer_s\n"));
    assert_eq!(csv.lines().count(), 13);
    assert!(stderr(&ev).contains("# checkpoint_sha256"));

    let floor = ncage(&[&eval_args[..], &["--tau-floor", "1.01"]].concat(), p);
    assert_eq!(floor.status.code(), Some(3));
}

#[test]
fn resumed_training_matches_uninterrupted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let full = ncage(&[TINY_TRAIN, &["--checkpoint", "full.ckpt", "--trace", "full.csv"]].concat(), p);
    assert!(full.status.success(), "{}", stderr(&full));

    let part = ncage(
        &[TINY_TRAIN, &["--stop-after", "96", "--checkpoint", "part.ckpt", "--trace", "a.csv"]].concat(),
        p,
    );
    assert!(part.status.success(), "{}", stderr(&part));
    let rest = ncage(
        &["train", "--resume", "part.ckpt", "--checkpoint", "rest.ckpt", "--trace", "b.csv", "-q"],
        p,
    );
    assert!(rest.status.success(), "{}", stderr(&rest));

    let full_trace = fs::read_to_string(p.join("full.csv")).unwrap();
    let a = fs::read_to_string(p.join("a.csv")).unwrap();
    let b = fs::read_to_string(p.join("b.csv")).unwrap();
    let joined: Vec<_> = a.lines().chain(b.lines().skip(1)).collect();
    assert_eq!(joined, full_trace.lines().collect::<Vec<_>>());
}

#[test]
fn bench_writes_one_row_per_graph() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(ncage(TINY_TRAIN, p).status.success());
    let out = ncage(
        &["bench", "--checkpoint", "model.ckpt", "--ladder", "200,400", "--repeats", "2"],
        p,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("graph_id,n,m,repeats,"));
    assert_eq!(text.lines().count(), 3);
    assert!(stderr(&out).contains("r2"));
}

//! Kendall tau-b scoring, synthetic test sets and inference timing.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{compute_with, CentralityKind, PowerIterationOptions};
use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::graph::{generate, GeneratorSpec, Graph, TopologyFamily};
use crate::model::{Model, ModelKind};
use crate::scalar::Scalar;
use crate::train::Precision;

/// Kendall tau-b in `O(n log n)`.
///
/// Returns `NaN` (and logs a warning) when either list is constant, where
/// the coefficient is undefined.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidParameter(format!("tau-b needs at least 2 items, got {n}")));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("tau-b input contains NaN".into()));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    let pairs = |t: u64| t * (t - 1) / 2;
    let n0 = pairs(n as u64);
    let (mut tied_x, mut tied_xy) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in idx.windows(2) {
        let (a, b) = (w[0], w[1]);
        if x[a] == x[b] {
            run_x += 1;
            if y[a] == y[b] {
                run_xy += 1;
            } else {
                tied_xy += pairs(run_xy);
                run_xy = 1;
            }
        } else {
            tied_x += pairs(run_x);
            tied_xy += pairs(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    tied_x += pairs(run_x);
    tied_xy += pairs(run_xy);

    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tied_y = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            tied_y += pairs(run_y);
            run_y = 1;
        }
    }
    tied_y += pairs(run_y);

    if tied_x == n0 || tied_y == n0 {
        log::warn!("tau-b undefined: one ranking is constant");
        return Ok(f64::NAN);
    }
    let numer = n0 as f64 - tied_x as f64 - tied_y as f64 + tied_xy as f64 - 2.0 * swaps as f64;
    let denom = (((n0 - tied_x) as u128 * (n0 - tied_y) as u128) as f64).sqrt();
    Ok((numer / denom).clamp(-1.0, 1.0))
}

/// Stable merge sort of `v` returning the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (lo, hi) = v.split_at_mut(mid);
        let (blo, bhi) = buf.split_at_mut(mid);
        merge_count(lo, blo) + merge_count(hi, bhi)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// Mean and sample standard deviation; `(NaN, NaN)` for an empty slice and
/// a zero deviation for a single value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("a fit needs at least 2 points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit { slope, intercept, r2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    Sw,
    Sf,
    Rnd,
    Mix,
}

impl SetKind {
    pub const ALL: [SetKind; 4] = [SetKind::Sw, SetKind::Sf, SetKind::Rnd, SetKind::Mix];

    pub fn as_str(&self) -> &'static str {
        match self {
            SetKind::Sw => "sw",
            SetKind::Sf => "sf",
            SetKind::Rnd => "rnd",
            SetKind::Mix => "mix",
        }
    }

    /// Topology of the `i`-th graph in the set. MIX cycles through the
    /// three families.
    pub fn family(&self, i: usize) -> TopologyFamily {
        match self {
            SetKind::Sw => TopologyFamily::SmallWorld,
            SetKind::Sf => TopologyFamily::ScaleFree,
            SetKind::Rnd => TopologyFamily::Random,
            SetKind::Mix => TopologyFamily::ALL[i % 3],
        }
    }

    fn stream(&self) -> u64 {
        match self {
            SetKind::Sw => 0,
            SetKind::Sf => 1,
            SetKind::Rnd => 2,
            SetKind::Mix => 3,
        }
    }
}

impl fmt::Display for SetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sw" => Ok(SetKind::Sw),
            "sf" => Ok(SetKind::Sf),
            "rnd" => Ok(SetKind::Rnd),
            "mix" => Ok(SetKind::Mix),
            other => Err(Error::InvalidParameter(format!("unknown test set {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSetConfig {
    pub graphs_per_set: usize,
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for TestSetConfig {
    fn default() -> Self {
        TestSetConfig {
            graphs_per_set: 100,
            min_nodes: 100,
            max_nodes: 1000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestGraph {
    pub id: usize,
    pub spec: GeneratorSpec,
    /// Largest connected component of the generated graph.
    pub graph: Graph,
}

#[derive(Debug, Clone)]
pub struct TestSet {
    pub kind: SetKind,
    pub graphs: Vec<TestGraph>,
}

/// Generator specs for one test set, independent of the other sets.
pub fn test_set_specs(kind: SetKind, cfg: &TestSetConfig) -> Vec<GeneratorSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(kind.stream());
    (0..cfg.graphs_per_set)
        .map(|i| {
            let n = rng.gen_range(cfg.min_nodes..=cfg.max_nodes);
            GeneratorSpec::new(kind.family(i).with_defaults(n), n, rng.gen())
        })
        .collect()
}

pub fn build_test_set(kind: SetKind, cfg: &TestSetConfig) -> Result<TestSet> {
    if cfg.min_nodes < 5 || cfg.min_nodes > cfg.max_nodes {
        return Err(Error::InvalidParameter(format!(
            "test graphs need 5 <= min_nodes <= max_nodes, got {}..={}",
            cfg.min_nodes, cfg.max_nodes
        )));
    }
    let graphs = test_set_specs(kind, cfg)
        .into_par_iter()
        .enumerate()
        .map(|(id, spec)| Ok(TestGraph { id, spec, graph: generate(&spec)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(TestSet { kind, graphs })
}

/// The four standard sets in the order SW, SF, RND, MIX.
pub fn build_test_sets(cfg: &TestSetConfig) -> Result<Vec<TestSet>> {
    SetKind::ALL.iter().map(|&k| build_test_set(k, cfg)).collect()
}

/// A trained model in whichever precision it was trained.
#[derive(Debug, Clone)]
pub enum Predictor {
    F32(Model<f32>),
    F64(Model<f64>),
}

impl Predictor {
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        Ok(match ckpt.config.precision {
            Precision::F32 => Predictor::F32(ckpt.model()?),
            Precision::F64 => Predictor::F64(ckpt.model()?),
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            Predictor::F32(m) => m.config.kind,
            Predictor::F64(m) => m.config.kind,
        }
    }

    /// Predicted ranks with the time spent preparing inputs (adjacency
    /// operator, features, eigenvector for the baseline) and running the
    /// model.
    pub fn timed_predict(
        &self,
        g: &Graph,
        eig: &PowerIterationOptions,
    ) -> Result<(Vec<f64>, Duration, Duration)> {
        fn go<T: Scalar>(
            m: &Model<T>,
            g: &Graph,
            eig: &PowerIterationOptions,
        ) -> Result<(Vec<f64>, Duration, Duration)> {
            let t0 = Instant::now();
            let input = m.prepare(g, eig)?;
            let t1 = Instant::now();
            let ranks = m.predict_ranks(&input)?;
            let t2 = Instant::now();
            Ok((ranks, t1 - t0, t2 - t1))
        }
        match self {
            Predictor::F32(m) => go(m, g, eig),
            Predictor::F64(m) => go(m, g, eig),
        }
    }

    pub fn predict_ranks(&self, g: &Graph, eig: &PowerIterationOptions) -> Result<Vec<f64>> {
        Ok(self.timed_predict(g, eig)?.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphRecord {
    pub set: String,
    pub topology: String,
    pub graph_id: usize,
    pub n: usize,
    pub m: usize,
    pub tau_b: f64,
    pub prep_s: f64,
    pub infer_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSummary {
    pub set: String,
    pub graphs: usize,
    /// Graphs whose tau-b was undefined; excluded from the mean.
    pub undefined: usize,
    pub mean_tau_b: f64,
    pub std_tau_b: f64,
    pub mean_prep_s: f64,
    pub mean_infer_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub centrality: CentralityKind,
    pub records: Vec<GraphRecord>,
    pub summaries: Vec<SetSummary>,
}

pub const CSV_HEADER: &str = "set,topology,graph_id,n,m,tau_b,prep_s,infer_s";

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.9},{:.9}\n",
                r.set, r.topology, r.graph_id, r.n, r.m, r.tau_b, r.prep_s, r.infer_s
            ));
        }
        out
    }

    pub fn summary(&self, set: SetKind) -> Option<&SetSummary> {
        self.summaries.iter().find(|s| s.set == set.as_str())
    }

    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            centrality: CentralityKind,
            sets: &'a [SetSummary],
        }
        serde_json::to_string_pretty(&Summary {
            centrality: self.centrality,
            sets: &self.summaries,
        })
        .expect("summary serializes")
    }
}

fn summarize(set: &str, records: &[GraphRecord]) -> SetSummary {
    let taus: Vec<f64> = records.iter().map(|r| r.tau_b).filter(|t| !t.is_nan()).collect();
    let (mean, std) = mean_std(&taus);
    let avg = |f: fn(&GraphRecord) -> f64| {
        records.iter().map(f).sum::<f64>() / records.len().max(1) as f64
    };
    SetSummary {
        set: set.to_string(),
        graphs: records.len(),
        undefined: records.len() - taus.len(),
        mean_tau_b: mean,
        std_tau_b: std,
        mean_prep_s: avg(|r| r.prep_s),
        mean_infer_s: avg(|r| r.infer_s),
    }
}

/// Scores any rank predictor against exact ranks on every graph of `sets`.
pub fn evaluate_with<F>(
    centrality: CentralityKind,
    sets: &[TestSet],
    eig: &PowerIterationOptions,
    predict: F,
) -> Result<EvalReport>
where
    F: Fn(&Graph) -> Result<(Vec<f64>, Duration, Duration)> + Sync,
{
    let mut records = Vec::new();
    let mut summaries = Vec::new();
    for set in sets {
        let recs = set
            .graphs
            .par_iter()
            .map(|tg| {
                let (pred, prep, infer) = predict(&tg.graph)?;
                let truth = compute_with(centrality, &tg.graph, eig)?.ranks();
                Ok(GraphRecord {
                    set: set.kind.to_string(),
                    topology: tg.spec.topology.family().to_string(),
                    graph_id: tg.id,
                    n: tg.graph.n(),
                    m: tg.graph.num_edges(),
                    tau_b: kendall_tau_b(&pred, truth.values())?,
                    prep_s: prep.as_secs_f64(),
                    infer_s: infer.as_secs_f64(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        summaries.push(summarize(set.kind.as_str(), &recs));
        records.extend(recs);
    }
    Ok(EvalReport {
        centrality,
        records,
        summaries,
    })
}

/// Scores a checkpoint on `sets`. Refuses a checkpoint trained for another
/// centrality unless `allow_mismatch` is set.
pub fn evaluate(
    ckpt: &Checkpoint,
    centrality: CentralityKind,
    sets: &[TestSet],
    allow_mismatch: bool,
) -> Result<EvalReport> {
    ckpt.check_centrality(centrality, allow_mismatch)?;
    let predictor = Predictor::from_checkpoint(ckpt)?;
    let eig = ckpt.config.eigen;
    evaluate_with(centrality, sets, &eig, |g| predictor.timed_predict(g, &eig))
}

/// Mean and standard deviation of per-run mean tau-b, one entry per
/// retrained model.
pub fn retraining_spread(run_means: &[f64]) -> (f64, f64) {
    mean_std(run_means)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub graph_id: String,
    pub n: usize,
    pub m: usize,
    pub repeats: usize,
    pub prep_mean_s: f64,
    pub prep_std_s: f64,
    pub infer_mean_s: f64,
    pub infer_std_s: f64,
    pub total_mean_s: f64,
    pub total_std_s: f64,
}

pub const BENCH_CSV_HEADER: &str =
    "graph_id,n,m,repeats,prep_mean_s,prep_std_s,infer_mean_s,infer_std_s,total_mean_s,total_std_s";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}",
            self.graph_id,
            self.n,
            self.m,
            self.repeats,
            self.prep_mean_s,
            self.prep_std_s,
            self.infer_mean_s,
            self.infer_std_s,
            self.total_mean_s,
            self.total_std_s
        )
    }
}

/// Times input preparation plus inference `repeats` times per graph on the
/// calling thread. Graph loading and exact centralities are not timed.
pub fn bench_inference(
    predictor: &Predictor,
    graphs: &[(String, Graph)],
    repeats: usize,
    eig: &PowerIterationOptions,
) -> Result<Vec<BenchRecord>> {
    if repeats < 1 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    graphs
        .iter()
        .map(|(id, g)| {
            let mut prep = Vec::with_capacity(repeats);
            let mut infer = Vec::with_capacity(repeats);
            let mut total = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let (_, p, i) = predictor.timed_predict(g, eig)?;
                prep.push(p.as_secs_f64());
                infer.push(i.as_secs_f64());
                total.push((p + i).as_secs_f64());
            }
            let (prep_mean_s, prep_std_s) = mean_std(&prep);
            let (infer_mean_s, infer_std_s) = mean_std(&infer);
            let (total_mean_s, total_std_s) = mean_std(&total);
            Ok(BenchRecord {
                graph_id: id.clone(),
                n: g.n(),
                m: g.num_edges(),
                repeats,
                prep_mean_s,
                prep_std_s,
                infer_mean_s,
                infer_std_s,
                total_mean_s,
                total_std_s,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::compute;

    fn brute(x: &[f64], y: &[f64]) -> f64 {
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                let a = (x[i] - x[j]).signum() * if x[i] == x[j] { 0.0 } else { 1.0 };
                let b = (y[i] - y[j]).signum() * if y[i] == y[j] { 0.0 } else { 1.0 };
                match (a == 0.0, b == 0.0) {
                    (true, true) => {}
                    (true, false) => tx += 1,
                    (false, true) => ty += 1,
                    (false, false) if a == b => c += 1,
                    _ => d += 1,
                }
            }
        }
        (c - d) as f64 / (((c + d + tx) * (c + d + ty)) as f64).sqrt()
    }

    #[test]
    fn tau_examples() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(kendall_tau_b(&x, &x).unwrap(), 1.0);
        assert_eq!(kendall_tau_b(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        let y = [1.0, 3.0, 2.0, 4.0];
        // 5 concordant pairs, 1 discordant.
        assert!((kendall_tau_b(&x, &y).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        assert!((kendall_tau_b(&x, &y).unwrap() - brute(&x, &y)).abs() < 1e-15);
    }

    #[test]
    fn tau_with_ties_matches_brute_force() {
        let x = [1.0, 1.0, 2.0, 3.0, 3.0, 3.0, 0.5];
        let y = [2.0, 1.0, 2.0, 2.0, 5.0, 5.0, 9.0];
        assert!((kendall_tau_b(&x, &y).unwrap() - brute(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn tau_errors_and_sentinel() {
        assert!(matches!(kendall_tau_b(&[1.0], &[1.0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(kendall_tau_b(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1))));
        assert!(kendall_tau_b(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap().is_nan());
        assert!(kendall_tau_b(&[1.0, 2.0], &[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn fit_examples() {
        let f = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert_eq!(mean_std(&[0.25]), (0.25, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
    }

    fn small_sets() -> TestSetConfig {
        TestSetConfig {
            graphs_per_set: 9,
            min_nodes: 30,
            max_nodes: 60,
            seed: 3,
        }
    }

    #[test]
    fn test_sets_have_expected_composition() {
        let sets = build_test_sets(&small_sets()).unwrap();
        assert_eq!(sets.iter().map(|s| s.kind).collect::<Vec<_>>(), SetKind::ALL.to_vec());
        for s in &sets {
            assert_eq!(s.graphs.len(), 9);
            assert!(s.graphs.iter().all(|g| g.graph.is_connected() && g.graph.n() <= 60));
        }
        let mix = &sets[3];
        for fam in TopologyFamily::ALL {
            assert_eq!(mix.graphs.iter().filter(|g| g.spec.topology.family() == fam).count(), 3);
        }
        assert!(sets[1].graphs.iter().all(|g| g.spec.topology.family() == TopologyFamily::ScaleFree));
        let again = build_test_sets(&small_sets()).unwrap();
        for (a, b) in sets.iter().zip(&again) {
            for (ga, gb) in a.graphs.iter().zip(&b.graphs) {
                assert_eq!(ga.graph, gb.graph);
            }
        }
    }

    #[test]
    fn default_sets_hold_100_graphs_each() {
        let cfg = TestSetConfig::default();
        for kind in SetKind::ALL {
            let specs = test_set_specs(kind, &cfg);
            assert_eq!(specs.len(), 100);
            assert!(specs.iter().all(|s| (100..=1000).contains(&s.n)));
        }
    }

    #[test]
    fn oracle_scores_perfectly() {
        let sets = build_test_sets(&small_sets()).unwrap();
        let eig = PowerIterationOptions::default();
        let report = evaluate_with(CentralityKind::Closeness, &sets, &eig, |g| {
            let r = compute(CentralityKind::Closeness, g)?.ranks().into_values();
            Ok((r, Duration::ZERO, Duration::ZERO))
        })
        .unwrap();
        assert_eq!(report.records.len(), 36);
        assert!(report.records.iter().all(|r| r.tau_b == 1.0));
        assert!(report.summaries.iter().all(|s| s.mean_tau_b == 1.0 && s.std_tau_b == 0.0));
        let csv = report.to_csv();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 37);
        assert!(report.summary_json().contains("\"mean_tau_b\": 1.0"));
    }

    #[test]
    fn constant_predictor_is_undefined() {
        let sets = vec![build_test_set(SetKind::Sf, &small_sets()).unwrap()];
        let eig = PowerIterationOptions::default();
        let report = evaluate_with(CentralityKind::Degree, &sets, &eig, |g| {
            Ok((vec![0.5; g.n()], Duration::ZERO, Duration::ZERO))
        })
        .unwrap();
        assert_eq!(report.summaries[0].undefined, 9);
        assert!(report.summaries[0].mean_tau_b.is_nan());
    }
}

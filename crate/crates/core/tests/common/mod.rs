//! Independent reference implementations shared by the property tests and
//! the acceptance suite. None of these reuse library algorithms.

#![allow(dead_code, clippy::needless_range_loop)]

use ncage_core::autodiff::Tape;
use ncage_core::centrality::PowerIterationOptions;
use ncage_core::head;
use ncage_core::{Graph, Matrix, Model, ModelConfig, ModelKind};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random spanning tree plus independent extra edges with probability `p`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        edges.push((order[i], parent));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

pub fn adjacency_matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// All-pairs hop distances; `usize::MAX` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let a = adjacency_matrix(g);
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                d[i][j] = 0;
            } else if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    for row in &mut d {
        for x in row.iter_mut() {
            if *x >= inf {
                *x = usize::MAX;
            }
        }
    }
    d
}

pub fn closeness_oracle(g: &Graph) -> Vec<f64> {
    let n = g.n();
    floyd_warshall(g)
        .iter()
        .map(|row| {
            let total: usize = row.iter().sum();
            if total == 0 {
                0.0
            } else {
                (n - 1) as f64 / total as f64
            }
        })
        .collect()
}

pub fn harmonic_oracle(g: &Graph) -> Vec<f64> {
    floyd_warshall(g)
        .iter()
        .map(|row| {
            row.iter()
                .filter(|&&d| d != 0 && d != usize::MAX)
                .map(|&d| 1.0 / d as f64)
                .sum()
        })
        .collect()
}

/// Betweenness over unordered pairs by listing every shortest path.
pub fn betweenness_oracle(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let d = floyd_warshall(g);
    let a = adjacency_matrix(g);
    let mut bc = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            if d[s][t] == usize::MAX {
                continue;
            }
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for w in 0..n {
                    if a[last][w] && d[s][w] == d[s][last] + 1 && d[w][t] + d[s][w] == d[s][t] {
                        let mut next = path.clone();
                        next.push(w);
                        stack.push(next);
                    }
                }
            }
            let total = paths.len() as f64;
            for v in 0..n {
                if v == s || v == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&v)).count();
                bc[v] += through as f64 / total;
            }
        }
    }
    bc
}

/// Dominant eigenvector of the adjacency matrix by cyclic Jacobi rotations,
/// sign-normalized to a non-negative sum and unit length.
pub fn eigenvector_oracle(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let adj = adjacency_matrix(g);
    let mut a: Vec<Vec<f64>> = adj
        .iter()
        .map(|r| r.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let top = (0..n)
        .max_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap())
        .unwrap();
    let mut x: Vec<f64> = v.iter().map(|row| row[top]).collect();
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|e| *e = -*e);
    }
    let norm = x.iter().map(|e| e * e).sum::<f64>().sqrt();
    x.iter().map(|e| e / norm).collect()
}

/// Equal up to `ulps` units in the last place of the larger magnitude
/// (absolute near zero).
pub fn within_ulps(a: f64, b: f64, ulps: u32) -> bool {
    (a - b).abs() <= f64::from(ulps) * f64::EPSILON * a.abs().max(b.abs()).max(1.0)
}

pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    1.0 - dot / (na * nb)
}

/// Tau-b by enumerating all pairs.
pub fn tau_b_oracle(x: &[f64], y: &[f64]) -> f64 {
    let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            use std::cmp::Ordering::Equal;
            match (dx == Equal, dy == Equal) {
                (true, true) => {}
                (true, false) => tx += 1,
                (false, true) => ty += 1,
                (false, false) if dx == dy => c += 1,
                _ => d += 1,
            }
        }
    }
    (c - d) as f64 / (((c + d + tx) * (c + d + ty)) as f64).sqrt()
}

/// Mid-rank normalization by counting: `(#less + (#equal - 1) / 2) / (N - 1)`.
pub fn rank_oracle(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 1 {
        return vec![0.0];
    }
    values
        .iter()
        .map(|v| {
            let less = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            (less + (equal - 1.0) / 2.0) / (n - 1) as f64
        })
        .collect()
}

/// Training loss of `model` on nodes `ids` of `g` (with L2 term `lambda`).
pub fn model_loss(
    model: &Model<f64>,
    g: &Graph,
    ids: &[usize],
    targets: &[f64],
    lambda: f64,
) -> (f64, Vec<Matrix<f64>>) {
    let input = model.prepare(g, &PowerIterationOptions::default()).unwrap();
    let mut tape = Tape::new();
    let vars = model.params.on_tape(&mut tape);
    let pred = model.forward_on_tape(&mut tape, &input, &vars, ids).unwrap();
    let t = tape.constant(Matrix::column(targets.to_vec()));
    let reg = model.params.regularized(&vars);
    let loss = head::training_loss(&mut tape, pred, t, &reg, lambda).unwrap();
    let value = tape.value(loss).item();
    let mut grads = tape.backward(loss).unwrap();
    let grads = vars
        .iter()
        .zip(&model.params.values)
        .map(|(&v, p)| grads.take(v).unwrap_or_else(|| Matrix::zeros(p.rows(), p.cols())))
        .collect();
    (value, grads)
}

/// `||analytic - numeric|| / max(||analytic||, ||numeric||)` over every
/// parameter entry, with central differences of step `1e-6`.
pub fn gradient_check<R: Rng>(rng: &mut R, kind: ModelKind, n: usize, f: usize, layers: usize) -> f64 {
    let g = random_connected(rng, n, 0.4);
    let cfg = ModelConfig::new(kind).with_embed_dim(f).with_layers(layers);
    let mut model = Model::<f64>::init(cfg, rng.gen()).unwrap();
    // Nonzero biases exercise the bias path.
    for (spec, value) in model.params.specs.iter().zip(model.params.values.iter_mut()) {
        if spec.role == ncage_core::model::ParamRole::Bias {
            for x in value.data_mut() {
                *x = rng.gen_range(-0.5..0.5);
            }
        }
    }
    let b = rng.gen_range(1..=n);
    let ids: Vec<usize> = (0..b).map(|_| rng.gen_range(0..n)).collect();
    let targets: Vec<f64> = (0..b).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let lambda = 0.05;
    let (_, grads) = model_loss(&model, &g, &ids, &targets, lambda);

    let h = 1e-6;
    let (mut diff, mut na, mut nn) = (0.0, 0.0, 0.0);
    for p in 0..model.params.values.len() {
        for k in 0..model.params.values[p].data().len() {
            let orig = model.params.values[p].data()[k];
            model.params.values[p].data_mut()[k] = orig + h;
            let up = model_loss(&model, &g, &ids, &targets, lambda).0;
            model.params.values[p].data_mut()[k] = orig - h;
            let down = model_loss(&model, &g, &ids, &targets, lambda).0;
            model.params.values[p].data_mut()[k] = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads[p].data()[k];
            diff += (analytic - numeric) * (analytic - numeric);
            na += analytic * analytic;
            nn += numeric * numeric;
        }
    }
    diff.sqrt() / na.max(nn).sqrt().max(f64::MIN_POSITIVE)
}

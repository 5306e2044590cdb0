//! Exact node centralities and rank normalization.
//!
//! These produce the training targets and the evaluation ground truth, so
//! they always run in `f64`.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{connected_components, degree_vector, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Degree,
    Eigenvector,
    Closeness,
    Harmonic,
    Betweenness,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 5] = [
        CentralityKind::Degree,
        CentralityKind::Eigenvector,
        CentralityKind::Closeness,
        CentralityKind::Harmonic,
        CentralityKind::Betweenness,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Eigenvector => "eigenvector",
            CentralityKind::Closeness => "closeness",
            CentralityKind::Harmonic => "harmonic",
            CentralityKind::Betweenness => "betweenness",
        }
    }

    pub(crate) fn code(&self) -> u8 {
        match self {
            CentralityKind::Degree => 0,
            CentralityKind::Eigenvector => 1,
            CentralityKind::Closeness => 2,
            CentralityKind::Harmonic => 3,
            CentralityKind::Betweenness => 4,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CentralityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown centrality {s:?}")))
    }
}

/// Raw per-node centrality values.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    kind: CentralityKind,
    values: Vec<f64>,
}

impl CentralityVector {
    pub fn new(kind: CentralityKind, values: Vec<f64>) -> Self {
        CentralityVector { kind, values }
    }

    pub fn kind(&self) -> CentralityKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ranks(&self) -> RankVector {
        normalize_ranks(&self.values)
    }
}

/// Normalized ranks in `[0, 1]`; larger centrality maps to larger rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Mid-rank normalization: sort ascending, give ties the mean of their
/// 1-based positions, map rank `r` to `(r - 1) / (N - 1)`. A single node
/// gets rank 0.
pub fn normalize_ranks(values: &[f64]) -> RankVector {
    let n = values.len();
    if n <= 1 {
        return RankVector(vec![0.0; n]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let denom = (n - 1) as f64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end, zero-based mean is (start + end - 1) / 2.
        let mid = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mid / denom;
        }
        start = end;
    }
    RankVector(ranks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerIterationOptions {
    /// Convergence threshold on the max-norm change between iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerIterationOptions {
    fn default() -> Self {
        PowerIterationOptions {
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenvectorResult {
    pub vector: CentralityVector,
    pub iterations: usize,
}

/// Dominant eigenvector of the adjacency matrix by power iteration.
///
/// Iterates on `A + I`, which has the same eigenvectors as `A` but a strictly
/// dominant eigenvalue on connected bipartite graphs (stars, paths, trees,
/// even cycles) where plain iteration on `A` oscillates. Starts from the
/// all-ones vector and L2-normalizes every iterate.
pub fn eigenvector_centrality(g: &Graph, opts: &PowerIterationOptions) -> Result<EigenvectorResult> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut delta = f64::INFINITY;
    for it in 1..=opts.max_iter {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = x[i] + g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in y.iter_mut() {
            *v /= norm;
        }
        delta = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut y);
        if delta < opts.tol {
            return Ok(EigenvectorResult {
                vector: CentralityVector::new(CentralityKind::Eigenvector, x),
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        delta,
    })
}

/// Number of nodes at each BFS distance from `source`; index 0 is the
/// source itself.
fn distance_profile(g: &Graph, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) -> Vec<usize> {
    dist.fill(usize::MAX);
    dist[source] = 0;
    queue.clear();
    queue.push_back(source);
    let mut profile = vec![1usize];
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for &v in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = du + 1;
                if profile.len() <= du + 1 {
                    profile.push(0);
                }
                profile[du + 1] += 1;
                queue.push_back(v);
            }
        }
    }
    profile
}

fn per_source<F>(g: &Graph, f: F) -> Vec<f64>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    (0..g.n())
        .into_par_iter()
        .map_init(
            || (vec![0usize; g.n()], VecDeque::new()),
            |(dist, queue), s| f(&distance_profile(g, s, dist, queue)),
        )
        .collect()
}

/// Closeness `c_i = (N - 1) / sum_j d(i, j)` from a BFS per node.
pub fn closeness_centrality(g: &Graph) -> Result<CentralityVector> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let (_, components) = connected_components(g);
    if components > 1 {
        return Err(Error::Disconnected { components });
    }
    let values = per_source(g, |profile| {
        let total: usize = profile.iter().enumerate().map(|(d, &c)| d * c).sum();
        if total == 0 {
            0.0
        } else {
            (n - 1) as f64 / total as f64
        }
    });
    Ok(CentralityVector::new(CentralityKind::Closeness, values))
}

/// Harmonic `h_i = sum_j 1 / d(i, j)`, unreachable pairs contributing 0.
///
/// Summed per distance level so that nodes with the same distance profile
/// get bit-identical values.
pub fn harmonic_centrality(g: &Graph) -> CentralityVector {
    let values = per_source(g, |profile| {
        profile
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, &c)| c as f64 / d as f64)
            .sum()
    });
    CentralityVector::new(CentralityKind::Harmonic, values)
}

/// Sources handled per parallel work item; fixed so the reduction order does
/// not depend on the thread count.
const BETWEENNESS_CHUNK: usize = 32;

/// Betweenness over unordered pairs `{s, t}` by shortest-path counting and
/// dependency accumulation (Brandes), `O(N |E|)`.
pub fn betweenness_centrality(g: &Graph) -> CentralityVector {
    let n = g.n();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(BETWEENNESS_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut state = BrandesState::new(n);
            for &s in chunk {
                state.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut values = vec![0.0; n];
    for part in partials {
        for (v, p) in values.iter_mut().zip(part) {
            *v += p;
        }
    }
    // Every unordered pair was visited once from each endpoint.
    for v in values.iter_mut() {
        *v /= 2.0;
    }
    CentralityVector::new(CentralityKind::Betweenness, values)
}

struct BrandesState {
    order: Vec<usize>,
    queue: VecDeque<usize>,
    dist: Vec<usize>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
}

impl BrandesState {
    fn new(n: usize) -> Self {
        BrandesState {
            order: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
            dist: vec![usize::MAX; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
        }
    }

    fn accumulate(&mut self, g: &Graph, s: usize, acc: &mut [f64]) {
        self.order.clear();
        self.dist.fill(usize::MAX);
        self.sigma.fill(0.0);
        self.delta.fill(0.0);
        self.dist[s] = 0;
        self.sigma[s] = 1.0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.order.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] == usize::MAX {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                }
            }
        }
        // Predecessors of w are the neighbors one level closer to s.
        for &w in self.order.iter().rev() {
            let dw = self.dist[w];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in g.neighbors(w) {
                if self.dist[v] != usize::MAX && self.dist[v] + 1 == dw {
                    self.delta[v] += self.sigma[v] * coeff;
                }
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Computes any supported centrality with default solver settings.
pub fn compute(kind: CentralityKind, g: &Graph) -> Result<CentralityVector> {
    compute_with(kind, g, &PowerIterationOptions::default())
}

pub fn compute_with(
    kind: CentralityKind,
    g: &Graph,
    eig: &PowerIterationOptions,
) -> Result<CentralityVector> {
    match kind {
        CentralityKind::Degree => Ok(degree_vector(g)),
        CentralityKind::Eigenvector => Ok(eigenvector_centrality(g, eig)?.vector),
        CentralityKind::Closeness => closeness_centrality(g),
        CentralityKind::Harmonic => Ok(harmonic_centrality(g)),
        CentralityKind::Betweenness => Ok(betweenness_centrality(g)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn ranks_examples() {
        assert_eq!(normalize_ranks(&[10.0, 30.0, 20.0]).values(), &[0.0, 1.0, 0.5]);
        assert_eq!(normalize_ranks(&[5.0, 5.0, 9.0]).values(), &[0.25, 0.25, 1.0]);
        assert_eq!(normalize_ranks(&[3.0; 4]).values(), &[0.5; 4]);
        assert_eq!(normalize_ranks(&[7.0]).values(), &[0.0]);
        assert!(normalize_ranks(&[]).is_empty());
    }

    #[test]
    fn eigenvector_cycle() {
        let r = eigenvector_centrality(&cycle(4), &Default::default()).unwrap();
        assert!(close(r.vector.values(), &[0.5; 4], 1e-12));
    }

    #[test]
    fn eigenvector_star() {
        let r = eigenvector_centrality(&star(4), &Default::default()).unwrap();
        let leaf = 1.0 / (2.0 * 2f64.sqrt());
        assert!(close(
            r.vector.values(),
            &[1.0 / 2f64.sqrt(), leaf, leaf, leaf, leaf],
            1e-9
        ));
        assert!(r.iterations > 1);
    }

    #[test]
    fn eigenvector_path3() {
        // Eigenpair of [[0,1,0],[1,0,1],[0,1,0]]: lambda = sqrt(2), x = (1, sqrt 2, 1) / 2.
        let r = eigenvector_centrality(&path(3), &Default::default()).unwrap();
        assert!(close(r.vector.values(), &[0.5, 2f64.sqrt() / 2.0, 0.5], 1e-9));
    }

    #[test]
    fn eigenvector_errors() {
        assert!(matches!(
            eigenvector_centrality(&Graph::empty(0), &Default::default()),
            Err(Error::EmptyGraph)
        ));
        let opts = PowerIterationOptions { tol: 1e-14, max_iter: 3 };
        assert!(matches!(
            eigenvector_centrality(&path(30), &opts),
            Err(Error::NoConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn closeness_examples() {
        let c = closeness_centrality(&star(4)).unwrap();
        assert!(close(c.values(), &[1.0, 4.0 / 7.0, 4.0 / 7.0, 4.0 / 7.0, 4.0 / 7.0], 1e-15));
        let c = closeness_centrality(&complete(3)).unwrap();
        assert_eq!(c.values(), &[1.0; 3]);
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            closeness_centrality(&split),
            Err(Error::Disconnected { components: 2 })
        ));
    }

    #[test]
    fn harmonic_examples() {
        let h = harmonic_centrality(&star(4));
        assert_eq!(h.values(), &[4.0, 2.5, 2.5, 2.5, 2.5]);
        let split = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(harmonic_centrality(&split).values(), &[1.0; 4]);
    }

    #[test]
    fn betweenness_examples() {
        assert_eq!(betweenness_centrality(&star(4)).values(), &[6.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(betweenness_centrality(&path(4)).values(), &[0.0, 2.0, 2.0, 0.0]);
        // C5: each node is the midpoint of exactly one pair, its two neighbours.
        let b = betweenness_centrality(&cycle(5));
        assert!(b.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
        assert_eq!(betweenness_centrality(&Graph::empty(3)).values(), &[0.0; 3]);
    }

    #[test]
    fn kind_round_trip() {
        for k in CentralityKind::ALL {
            assert_eq!(k.as_str().parse::<CentralityKind>().unwrap(), k);
            assert_eq!(CentralityKind::from_code(k.code()), Some(k));
        }
    }
}

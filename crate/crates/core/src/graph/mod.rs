//! Undirected, unweighted graphs in compressed sparse row form.

mod components;
mod generate;
mod io;

pub use components::{connected_components, largest_component, largest_component_with_ids};
pub use generate::{generate, GeneratorSpec, Topology, TopologyFamily};
pub use io::{load_edge_list, read_edge_list, save_edge_list, write_edge_list, LoadedGraph};

use crate::centrality::{CentralityKind, CentralityVector};
use crate::error::{Error, Result};

/// Simple undirected graph. Every edge `{u, v}` is stored twice, once in the
/// row of `u` and once in the row of `v`; rows are sorted.
///
/// Values are immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
        }
    }

    /// Builds a graph from an edge iterator. Duplicate and reversed pairs
    /// collapse into one edge; self-loops and out-of-range ids are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            if u >= n {
                return Err(Error::NodeOutOfRange { id: u, n });
            }
            if v >= n {
                return Err(Error::NodeOutOfRange { id: v, n });
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop on node {u}")));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in &pairs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.into_iter().map(|(_, v)| v).collect();
        Ok(Graph { offsets, targets })
    }

    /// Node count `N`.
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Undirected edge count `|E|`.
    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Row offsets of the CSR layout (length `N + 1`).
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Column indices of the CSR layout (length `2|E|`).
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// Canonical edge list: each edge once as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::LengthMismatch(perm.len(), n));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(
                    "permutation is not a bijection".into(),
                ));
            }
        }
        Graph::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && connected_components(self).1 == 1
    }

    /// Structural self-check: symmetric, sorted rows, no loops or duplicates.
    pub fn check_invariants(&self) -> bool {
        let n = self.n();
        (0..n).all(|u| {
            let row = self.neighbors(u);
            row.windows(2).all(|w| w[0] < w[1])
                && row.iter().all(|&v| v < n && v != u && self.has_edge(v, u))
        })
    }
}

/// Degree centrality `d_i = sum_j a_ij`.
pub fn degree_vector(g: &Graph) -> CentralityVector {
    let values = (0..g.n()).map(|i| g.degree(i) as f64).collect();
    CentralityVector::new(CentralityKind::Degree, values)
}

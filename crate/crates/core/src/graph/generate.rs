//! Synthetic network families: Barabási–Albert scale-free,
//! Watts–Strogatz small-world and Erdős–Rényi random graphs.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{largest_component, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "topology", rename_all = "kebab-case")]
pub enum Topology {
    /// Preferential attachment; every new node brings `m` edges.
    ScaleFree { m: usize },
    /// Ring lattice of even degree `k`, each edge rewired with probability `p`.
    SmallWorld { k: usize, p: f64 },
    /// Every pair connected independently with probability `p`.
    Random { p: f64 },
}

impl Topology {
    pub const DEFAULT_SF_M: usize = 2;
    pub const DEFAULT_SW_K: usize = 4;
    pub const DEFAULT_SW_P: f64 = 0.1;
    /// Target mean degree of the default random family.
    pub const DEFAULT_RND_DEGREE: f64 = 4.0;

    pub fn scale_free() -> Self {
        Topology::ScaleFree {
            m: Self::DEFAULT_SF_M,
        }
    }

    pub fn small_world() -> Self {
        Topology::SmallWorld {
            k: Self::DEFAULT_SW_K,
            p: Self::DEFAULT_SW_P,
        }
    }

    /// Random graph whose expected mean degree is 4 for `n` nodes.
    pub fn random_for(n: usize) -> Self {
        let p = if n > 1 {
            (Self::DEFAULT_RND_DEGREE / (n - 1) as f64).min(1.0)
        } else {
            1.0
        };
        Topology::Random { p }
    }

    /// Short family tag: `sf`, `sw` or `rnd`.
    pub fn family(&self) -> TopologyFamily {
        match self {
            Topology::ScaleFree { .. } => TopologyFamily::ScaleFree,
            Topology::SmallWorld { .. } => TopologyFamily::SmallWorld,
            Topology::Random { .. } => TopologyFamily::Random,
        }
    }
}

/// Topology without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TopologyFamily {
    #[serde(rename = "sf")]
    ScaleFree,
    #[serde(rename = "sw")]
    SmallWorld,
    #[serde(rename = "rnd")]
    Random,
}

impl TopologyFamily {
    pub const ALL: [TopologyFamily; 3] = [
        TopologyFamily::SmallWorld,
        TopologyFamily::ScaleFree,
        TopologyFamily::Random,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TopologyFamily::ScaleFree => "sf",
            TopologyFamily::SmallWorld => "sw",
            TopologyFamily::Random => "rnd",
        }
    }

    /// Family with its default parameters for an `n`-node graph.
    pub fn with_defaults(&self, n: usize) -> Topology {
        match self {
            TopologyFamily::ScaleFree => Topology::scale_free(),
            TopologyFamily::SmallWorld => Topology::small_world(),
            TopologyFamily::Random => Topology::random_for(n),
        }
    }
}

impl fmt::Display for TopologyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sf" | "scale-free" | "ba" => Ok(TopologyFamily::ScaleFree),
            "sw" | "small-world" | "ws" => Ok(TopologyFamily::SmallWorld),
            "rnd" | "random" | "er" => Ok(TopologyFamily::Random),
            other => Err(Error::InvalidParameter(format!("unknown topology {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub topology: Topology,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(topology: Topology, n: usize, seed: u64) -> Self {
        GeneratorSpec { topology, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        let check_p = |p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                bad(format!("p must lie in [0, 1], got {p}"))
            }
        };
        match self.topology {
            Topology::ScaleFree { m } => {
                if m < 1 || m >= self.n {
                    return bad(format!("scale-free m must satisfy 1 <= m < n, got m={m}"));
                }
            }
            Topology::SmallWorld { k, p } => {
                if k % 2 != 0 || k >= self.n {
                    return bad(format!("small-world k must be even and < n, got k={k}"));
                }
                check_p(p)?;
            }
            Topology::Random { p } => check_p(p)?,
        }
        Ok(())
    }
}

/// Generates a connected graph. Small-world and random outputs are reduced
/// to their largest connected component, so they may have fewer than `n`
/// nodes. Deterministic for a fixed seed.
pub fn generate(spec: &GeneratorSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    match spec.topology {
        Topology::ScaleFree { m } => barabasi_albert(n, m, &mut rng),
        Topology::SmallWorld { k, p } => {
            Ok(largest_component(&watts_strogatz(n, k, p, &mut rng)?))
        }
        Topology::Random { p } => Ok(largest_component(&erdos_renyi(n, p, &mut rng)?)),
    }
}

/// Seed clique on `m` nodes, then each new node attaches to `m` distinct
/// existing nodes drawn proportionally to degree. Produces exactly
/// `m(m-1)/2 + m(n-m)` edges.
fn barabasi_albert(n: usize, m: usize, rng: &mut impl Rng) -> Result<Graph> {
    let mut edges = Vec::with_capacity(m * (m.saturating_sub(1)) / 2 + m * (n - m));
    // Each node appears once per incident edge endpoint.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * m * n);
    for u in 0..m {
        for v in u + 1..m {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for v in m..n {
        chosen.clear();
        if endpoints.is_empty() {
            // Only reachable for m = 1: the seed is a lone node of degree 0.
            while chosen.len() < m {
                let t = rng.gen_range(0..v);
                if !chosen.contains(&t) {
                    chosen.push(t);
                }
            }
        } else {
            while chosen.len() < m {
                let t = endpoints[rng.gen_range(0..endpoints.len())];
                if !chosen.contains(&t) {
                    chosen.push(t);
                }
            }
        }
        for &t in &chosen {
            edges.push((v, t));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, edges)
}

fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut impl Rng) -> Result<Graph> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }
    if p > 0.0 {
        for j in 1..=k / 2 {
            for u in 0..n {
                let v = (u + j) % n;
                if !adj[u].contains(&v) || rng.gen::<f64>() >= p {
                    continue;
                }
                if adj[u].len() >= n - 1 {
                    continue;
                }
                let mut w = rng.gen_range(0..n);
                while w == u || adj[u].contains(&w) {
                    w = rng.gen_range(0..n);
                }
                adj[u].remove(&v);
                adj[v].remove(&u);
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, row)| row.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
        .collect::<Vec<_>>();
    Graph::from_edges(n, edges)
}

fn erdos_renyi(n: usize, p: f64, rng: &mut impl Rng) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

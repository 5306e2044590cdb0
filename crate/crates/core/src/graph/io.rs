//! Whitespace-separated edge lists in the SNAP layout.
//!
//! ```text
//! # Nodes: 4 Edges: 3
//! 0 1
//! 1 2
//! 2 3
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

/// A graph read from disk plus the bookkeeping of how it was canonicalized.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// File id of every node; node `i` of `graph` was `original_ids[i]`.
    pub original_ids: Vec<u64>,
    pub self_loops: usize,
    pub duplicates: usize,
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_edge_list(BufReader::new(file), path)
}

/// Parses an edge list. `#` starts a comment line. A `# Nodes: N` comment is
/// honoured when every id lies in `0..N`, which keeps isolated nodes;
/// otherwise the distinct ids are relabeled to `0..k` in ascending order.
/// Columns after the first two are ignored.
pub fn read_edge_list<R: Read>(reader: R, path: &Path) -> Result<LoadedGraph> {
    let mut declared_nodes: Option<u64> = None;
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut self_loops = 0;
    let mut duplicates = 0;

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if declared_nodes.is_none() {
                declared_nodes = parse_nodes_header(comment);
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!("non-integer token {tok:?}"),
            })
        };
        let u = parse(tokens.next())?;
        let v = parse(tokens.next())?;
        if u == v {
            self_loops += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            pairs.push(key);
        } else {
            duplicates += 1;
        }
    }

    if self_loops > 0 {
        log::warn!("{}: dropped {self_loops} self-loop(s)", path.display());
    }
    if duplicates > 0 {
        log::debug!("{}: merged {duplicates} duplicate edge(s)", path.display());
    }

    let max_id = pairs.iter().map(|&(_, v)| v).max();
    let identity = match (declared_nodes, max_id) {
        (Some(n), Some(max)) => max < n,
        (Some(_), None) => true,
        _ => false,
    };

    let (graph, original_ids) = if identity {
        let n = declared_nodes.unwrap_or(0) as usize;
        let g = Graph::from_edges(n, pairs.iter().map(|&(u, v)| (u as usize, v as usize)))?;
        (g, (0..n as u64).collect())
    } else {
        let ids: Vec<u64> = pairs
            .iter()
            .flat_map(|&(u, v)| [u, v])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let g = Graph::from_edges(ids.len(), pairs.iter().map(|(u, v)| (index[u], index[v])))?;
        (g, ids)
    };

    Ok(LoadedGraph {
        graph,
        original_ids,
        self_loops,
        duplicates,
    })
}

fn parse_nodes_header(comment: &str) -> Option<u64> {
    let mut tokens = comment.split_whitespace();
    while let Some(tok) = tokens.next() {
        if tok.eq_ignore_ascii_case("nodes:") {
            return tokens.next()?.parse().ok();
        }
    }
    None
}

pub fn save_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    write_edge_list(g, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes the canonical edge set (`u < v`, sorted), tab separated, under a
/// `# Nodes: N Edges: M` header.
pub fn write_edge_list<W: Write>(g: &Graph, w: &mut W) -> Result<()> {
    writeln!(w, "# Undirected graph")?;
    writeln!(w, "# Nodes: {} Edges: {}", g.n(), g.num_edges())?;
    writeln!(w, "# FromNodeId\tToNodeId")?;
    for (u, v) in g.edges() {
        writeln!(w, "{u}\t{v}")?;
    }
    Ok(())
}

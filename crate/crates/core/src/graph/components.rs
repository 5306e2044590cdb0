use std::collections::VecDeque;

use super::Graph;

/// Component label per node and the number of components. Labels are
/// assigned in order of each component's smallest node id.
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Induced subgraph on the largest connected component, ids relabeled to
/// `0..k` preserving their relative order. Equal-size components are broken
/// in favour of the one holding the smallest node id.
///
/// Also returns the original id of every retained node.
pub fn largest_component_with_ids(g: &Graph) -> (Graph, Vec<usize>) {
    let (label, count) = connected_components(g);
    if count <= 1 {
        return (g.clone(), (0..g.n()).collect());
    }
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    // max_by_key keeps the last maximum; scan manually to keep the first.
    let mut best = 0;
    for (c, &s) in sizes.iter().enumerate() {
        if s > sizes[best] {
            best = c;
        }
    }
    let kept: Vec<usize> = (0..g.n()).filter(|&i| label[i] == best).collect();
    let mut new_id = vec![usize::MAX; g.n()];
    for (k, &old) in kept.iter().enumerate() {
        new_id[old] = k;
    }
    let edges = g
        .edges()
        .filter(|&(u, _)| label[u] == best)
        .map(|(u, v)| (new_id[u], new_id[v]));
    let sub = Graph::from_edges(kept.len(), edges).expect("relabeled ids are in range");
    (sub, kept)
}

pub fn largest_component(g: &Graph) -> Graph {
    largest_component_with_ids(g).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::complete;

    #[test]
    fn connected_graph_is_returned_unchanged() {
        let g = complete(3);
        assert_eq!(largest_component(&g), g);
    }

    #[test]
    fn isolated_node_is_dropped() {
        let g = Graph::from_edges(4, [(1, 2), (2, 3), (1, 3)]).unwrap();
        let (sub, ids) = largest_component_with_ids(&g);
        assert_eq!(sub, complete(3));
        assert_eq!(ids, vec![1, 2, 3]);
    }

    #[test]
    fn equal_components_prefer_smallest_id() {
        let g = Graph::from_edges(4, [(2, 3), (0, 1)]).unwrap();
        let (sub, ids) = largest_component_with_ids(&g);
        assert_eq!(sub.num_edges(), 1);
        assert_eq!(ids, vec![0, 1]);

        let g = Graph::from_edges(5, [(3, 4), (1, 2)]).unwrap();
        let (_, ids) = largest_component_with_ids(&g);
        assert_eq!(ids, vec![1, 2]);
    }

    #[test]
    fn component_count() {
        let g = Graph::from_edges(5, [(0, 1), (3, 4)]).unwrap();
        let (label, count) = connected_components(&g);
        assert_eq!(count, 3);
        assert_eq!(label, vec![0, 0, 1, 2, 2]);
    }
}

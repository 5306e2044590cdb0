#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use ncage_core::centrality::{
    betweenness_centrality, closeness_centrality, eigenvector_centrality, harmonic_centrality,
    normalize_ranks,
};
use ncage_core::graph::{generate, load_edge_list, save_edge_list};
use ncage_core::{GeneratorSpec, Graph, PowerIterationOptions, Topology};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, 0.0..0.6f64, any::<u64>()).prop_map(|(n, p, seed)| {
        random_connected(&mut ChaCha8Rng::seed_from_u64(seed), n, p)
    })
}

#[test]
fn generators_hold_invariants_over_1000_seeds() {
    for seed in 0..1000u64 {
        let n = 10 + (seed as usize % 40);
        for topology in [Topology::scale_free(), Topology::small_world(), Topology::random_for(n)] {
            let g = generate(&GeneratorSpec::new(topology, n, seed)).unwrap();
            assert!(g.check_invariants(), "{topology:?} seed {seed}");
            assert!(g.is_connected(), "{topology:?} seed {seed}");
            for (u, v) in g.edges() {
                assert!(g.has_edge(v, u) && u != v);
            }
        }
    }
}

#[test]
fn scale_free_edge_count_and_min_degree() {
    for (m, seed) in [(1, 3), (2, 7), (3, 11), (5, 2)] {
        let n = 100;
        let g = generate(&GeneratorSpec::new(Topology::ScaleFree { m }, n, seed)).unwrap();
        // m-clique seed, then m edges for each of the remaining n - m nodes.
        assert_eq!(g.num_edges(), m * (m - 1) / 2 + m * (n - m));
        for v in m..n {
            assert!(g.degree(v) >= m);
        }
    }
}

#[test]
fn small_world_without_rewiring_is_regular() {
    for k in [2, 4, 6] {
        let g = generate(&GeneratorSpec::new(Topology::SmallWorld { k, p: 0.0 }, 30, 5)).unwrap();
        assert!((0..30).all(|v| g.degree(v) == k));
    }
}

#[test]
fn betweenness_matches_path_enumeration_on_200_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..200 {
        let n = 2 + i % 7;
        let g = random_connected(&mut rng, n, 0.35);
        let fast = betweenness_centrality(&g);
        for (a, b) in fast.values().iter().zip(betweenness_oracle(&g)) {
            assert!(within_ulps(*a, b, 4), "{a} vs {b} on {g:?}");
        }
    }
}

#[test]
fn tree_betweenness_sums_crossing_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let g = random_connected(&mut rng, 12, 0.0);
        let d = floyd_warshall(&g);
        // In a tree, v lies on the s-t path iff d(s,v) + d(v,t) = d(s,t).
        let crossing: usize = (0..12)
            .map(|v| {
                (0..12)
                    .flat_map(|s| (s + 1..12).map(move |t| (s, t)))
                    .filter(|&(s, t)| s != v && t != v && d[s][v] + d[v][t] == d[s][t])
                    .count()
            })
            .sum();
        let total: f64 = betweenness_centrality(&g).values().iter().sum();
        assert_eq!(total, crossing as f64);
    }
}

#[test]
fn path_and_star_examples() {
    let p4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    assert_eq!(betweenness_oracle(&p4), vec![0.0, 2.0, 2.0, 0.0]);
    let k14 = Graph::from_edges(5, (1..5).map(|i| (0, i))).unwrap();
    assert_eq!(betweenness_oracle(&k14)[0], 6.0);
    assert_eq!(closeness_oracle(&k14)[1], 4.0 / 7.0);
    assert_eq!(harmonic_oracle(&k14)[1], 2.5);
    let e = eigenvector_oracle(&k14);
    assert!((e[0] - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((e[1] - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn eigenvector_on_path_matches_dense_solve() {
    let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let x = eigenvector_centrality(&p3, &PowerIterationOptions::default()).unwrap();
    // Dominant eigenpair of P3: lambda = sqrt 2, x = (1, sqrt 2, 1) / 2.
    let want = [0.5, 0.5f64.sqrt(), 0.5];
    for (a, b) in x.vector.values().iter().zip(want) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(cosine_distance(x.vector.values(), &eigenvector_oracle(&p3)) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closeness_and_harmonic_match_floyd_warshall(g in arb_graph(64)) {
        let c = closeness_centrality(&g).unwrap();
        for (a, b) in c.values().iter().zip(closeness_oracle(&g)) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let h = harmonic_centrality(&g);
        for (a, b) in h.values().iter().zip(harmonic_oracle(&g)) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvector_matches_jacobi(g in arb_graph(50)) {
        let x = eigenvector_centrality(&g, &PowerIterationOptions::default()).unwrap();
        let v = x.vector.values();
        prop_assert!(v.iter().all(|&e| e >= 0.0));
        prop_assert!((v.iter().map(|e| e * e).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(cosine_distance(v, &eigenvector_oracle(&g)) < 1e-8);
    }

    #[test]
    fn harmonic_allows_disconnected(n in 2usize..30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_connected(&mut rng, n, 0.2);
        let b = random_connected(&mut rng, n, 0.2);
        let both = Graph::from_edges(2 * n, a.edges().chain(b.edges().map(|(u, v)| (u + n, v + n)))).unwrap();
        let h = harmonic_centrality(&both);
        for (x, y) in h.values().iter().zip(harmonic_oracle(&both)) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        prop_assert!(closeness_centrality(&both).is_err());
    }

    #[test]
    fn ranks_match_counting_oracle(values in prop::collection::vec(-5i32..5, 1..60)) {
        let values: Vec<f64> = values.into_iter().map(f64::from).collect();
        let r = normalize_ranks(&values);
        prop_assert_eq!(r.values(), &rank_oracle(&values)[..]);
    }

    #[test]
    fn ranks_invariant_under_monotone_maps(values in prop::collection::vec(-50.0..50.0f64, 1..60)) {
        let r = normalize_ranks(&values);
        let cubed: Vec<f64> = values.iter().map(|v| v * v * v + 3.0 * v).collect();
        let exp: Vec<f64> = values.iter().map(|v| (v / 10.0).exp()).collect();
        prop_assert_eq!(&r, &normalize_ranks(&cubed));
        prop_assert_eq!(&r, &normalize_ranks(&exp));
        prop_assert!(r.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn centralities_are_permutation_equivariant(g in arb_graph(30), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pg = g.permute(&perm).unwrap();
        let eig = PowerIterationOptions::default();
        for kind in ncage_core::CentralityKind::ALL {
            let a = ncage_core::centrality::compute_with(kind, &g, &eig).unwrap();
            let b = ncage_core::centrality::compute_with(kind, &pg, &eig).unwrap();
            for i in 0..g.n() {
                let (x, y) = (a.values()[i], b.values()[perm[i]]);
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{kind:?} {x} {y}");
            }
        }
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph(40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        save_edge_list(&g, &path).unwrap();
        let back = load_edge_list(&path).unwrap();
        prop_assert_eq!(back.graph, g);
    }
}

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sng_dbscan::graph::{
    build_full_graph, build_sampled_graph, connected_components, min_cut, pair_inclusion_probability,
    partners_per_vertex, SampledGraph,
};
use sng_dbscan::{Dataset, DistanceSpec};

fn random_data(n: usize, dim: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<f64> = (0..n * dim).map(|_| rng.random::<f64>()).collect();
    Dataset::new(v, dim).unwrap()
}

fn brute_edges(data: &Dataset, eps: f64) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for u in 0..data.n() {
        for v in u + 1..data.n() {
            let d: f64 = data
                .row(u)
                .iter()
                .zip(data.row(v))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d <= eps {
                out.insert((u, v));
            }
        }
    }
    out
}

fn edge_set(g: &SampledGraph) -> BTreeSet<(usize, usize)> {
    g.edges().collect()
}

#[test]
fn full_rate_matches_brute_force() {
    for (i, &(n, dim, eps)) in [(2, 1, 0.5), (17, 2, 0.3), (60, 3, 0.5), (150, 2, 0.1)].iter().enumerate() {
        let data = random_data(n, dim, i as u64);
        let want = brute_edges(&data, eps);
        let full = build_full_graph(&data, eps, &DistanceSpec::Euclidean).unwrap();
        let sampled = build_sampled_graph(&data, eps, 1.0, &DistanceSpec::Euclidean, 9).unwrap();
        assert_eq!(edge_set(&full), want);
        assert_eq!(edge_set(&sampled), want);
        assert_eq!(full.distance_evals(), (n * (n - 1) / 2) as u64);
        assert_eq!(sampled.distance_evals(), (n * (n - 1)) as u64);
    }
}

#[test]
fn sampled_edges_are_true_edges() {
    let data = random_data(400, 2, 3);
    let full = edge_set(&build_full_graph(&data, 0.2, &DistanceSpec::Euclidean).unwrap());
    for rate in [0.01, 0.05, 0.3] {
        let g = build_sampled_graph(&data, 0.2, rate, &DistanceSpec::Euclidean, 1).unwrap();
        assert!(edge_set(&g).is_subset(&full));
        assert_eq!(g.distance_evals(), 400 * partners_per_vertex(400, rate) as u64);
    }
}

#[test]
fn same_seed_same_graph() {
    let data = random_data(300, 3, 5);
    let a = build_sampled_graph(&data, 0.4, 0.07, &DistanceSpec::Euclidean, 42).unwrap();
    let b = build_sampled_graph(&data, 0.4, 0.07, &DistanceSpec::Euclidean, 42).unwrap();
    let c = build_sampled_graph(&data, 0.4, 0.07, &DistanceSpec::Euclidean, 43).unwrap();
    assert_eq!(a.to_edge_list(), b.to_edge_list());
    assert_ne!(a.to_edge_list(), c.to_edge_list());
}

#[test]
fn thread_count_does_not_change_graph() {
    let data = random_data(500, 2, 8);
    let build = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| build_sampled_graph(&data, 0.15, 0.1, &DistanceSpec::Euclidean, 4).unwrap())
    };
    assert_eq!(build(1).to_edge_list(), build(4).to_edge_list());
}

#[test]
fn mean_degree_matches_pair_inclusion() {
    // every pair within eps, so the degree counts examined pairs
    let n = 200;
    let data = Dataset::new(vec![0.0; n], 1).unwrap();
    let rate = 0.05;
    let p = pair_inclusion_probability(n, rate);
    let want = p * (n - 1) as f64;
    let trials = 40;
    let degs: Vec<f64> = (0..trials)
        .map(|s| {
            let g = build_sampled_graph(&data, 1.0, rate, &DistanceSpec::Euclidean, s).unwrap();
            g.degrees().iter().sum::<usize>() as f64 / n as f64
        })
        .collect();
    let mean = degs.iter().sum::<f64>() / trials as f64;
    // per-graph mean degree has variance below (n-1) p (1-p) / n
    let se = ((n - 1) as f64 * p * (1.0 - p) / n as f64 / trials as f64).sqrt();
    assert!((mean - want).abs() < 5.0 * se, "mean {mean} want {want} se {se}");
}

fn brute_min_cut(n: usize, edges: &[(usize, usize)]) -> u64 {
    let mut best = u64::MAX;
    // vertex 0 stays on side A; enumerate the rest
    for mask in 0u32..(1 << (n - 1)) {
        let side = |v: usize| v == 0 || mask >> (v - 1) & 1 == 1;
        if (1..n).all(side) {
            continue;
        }
        let cut = edges.iter().filter(|&&(u, v)| side(u) != side(v)).count() as u64;
        best = best.min(cut);
    }
    best
}

#[test]
fn bridged_triangles_cut_is_one() {
    let edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)];
    let g = SampledGraph::from_edges(6, edges).unwrap();
    assert_eq!(min_cut(&g).unwrap(), 1);
    assert_eq!(brute_min_cut(6, &edges), 1);
}

fn bfs_partition(n: usize, edges: &[(usize, usize)], active: &[bool]) -> Vec<Option<u32>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut label = vec![None; n];
    let mut next = 0;
    for s in 0..n {
        if !active[s] || label[s].is_some() {
            continue;
        }
        label[s] = Some(next);
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if active[v] && label[v].is_none() {
                    label[v] = Some(next);
                    q.push_back(v);
                }
            }
        }
        next += 1;
    }
    label
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = pairs.len();
        (Just(n), proptest::collection::vec(any::<bool>(), m)).prop_map(move |(n, keep)| {
            let e = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| *p).collect();
            (n, e)
        })
    })
}

proptest! {
    #[test]
    fn min_cut_matches_exhaustive((n, edges) in graph_strategy(12)) {
        let g = SampledGraph::from_edges(n, edges.iter().copied()).unwrap();
        prop_assert_eq!(min_cut(&g).unwrap(), brute_min_cut(n, &edges));
    }

    #[test]
    fn components_match_bfs(
        (n, edges) in graph_strategy(25),
        mask_seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(mask_seed);
        let active: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
        let g = SampledGraph::from_edges(n, edges.iter().copied()).unwrap();
        let comps = connected_components(&g, &active);
        let want = bfs_partition(n, &edges, &active);
        prop_assert_eq!(&comps.labels, &want);
        prop_assert_eq!(comps.count, want.iter().flatten().collect::<BTreeSet<_>>().len());
    }

    #[test]
    fn csr_is_symmetric_and_sorted((n, edges) in graph_strategy(30)) {
        let g = SampledGraph::from_edges(n, edges.iter().copied()).unwrap();
        prop_assert_eq!(g.edge_count(), edges.len());
        for u in 0..n {
            let nb = g.neighbors(u);
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &v in nb {
                prop_assert!(g.has_edge(v as usize, u));
            }
        }
    }
}

use std::collections::{BTreeMap, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sng_dbscan::metrics::{scores, NoisePolicy};
use sng_dbscan::{dbscan_exact, sng_dbscan, Clustering, Dataset, DistanceSpec, Role, SngParams};

/// Textbook quadratic DBSCAN: expand clusters by BFS from core points in
/// index order; a border point joins the lowest-numbered cluster among its
/// core neighbors; clusters are finally renumbered by smallest member.
fn reference_dbscan(data: &Dataset, eps: f64, min_pts: usize) -> (Vec<i64>, Vec<Role>) {
    let n = data.n();
    let d = |i: usize, j: usize| -> f64 {
        data.row(i).iter().zip(data.row(j)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    };
    let nbrs: Vec<Vec<usize>> = (0..n).map(|i| (0..n).filter(|&j| j != i && d(i, j) <= eps).collect()).collect();
    let core: Vec<bool> = nbrs.iter().map(|v| v.len() >= min_pts).collect();
    let mut cid = vec![-1i64; n];
    let mut next = 0;
    for s in 0..n {
        if !core[s] || cid[s] >= 0 {
            continue;
        }
        cid[s] = next;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &nbrs[u] {
                if core[v] && cid[v] < 0 {
                    cid[v] = next;
                    q.push_back(v);
                }
            }
        }
        next += 1;
    }
    let mut roles = vec![Role::Noise; n];
    for i in 0..n {
        if core[i] {
            roles[i] = Role::Core;
        } else if let Some(c) = nbrs[i].iter().filter(|&&j| core[j]).map(|&j| cid[j]).min() {
            cid[i] = c;
            roles[i] = Role::Border;
        }
    }
    let mut remap = BTreeMap::new();
    let labels = cid
        .iter()
        .map(|&c| {
            if c < 0 {
                -1
            } else {
                let k = remap.len() as i64;
                *remap.entry(c).or_insert(k)
            }
        })
        .collect();
    (labels, roles)
}

fn two_moons(n: usize, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vec::with_capacity(2 * n);
    for i in 0..n {
        let t = std::f64::consts::PI * rng.random::<f64>();
        let (x, y) = if i % 2 == 0 { (t.cos(), t.sin()) } else { (1.0 - t.cos(), 0.5 - t.sin()) };
        v.push(x + noise * (rng.random::<f64>() - 0.5));
        v.push(y + noise * (rng.random::<f64>() - 0.5));
    }
    Dataset::new(v, 2).unwrap()
}

fn check_against_reference(data: &Dataset, eps: f64, min_pts: usize) {
    let got = dbscan_exact(data, eps, min_pts, &DistanceSpec::Euclidean).unwrap();
    let (labels, roles) = reference_dbscan(data, eps, min_pts);
    assert_eq!(got.labels(), labels);
    assert_eq!(got.roles(), roles.as_slice());
}

#[test]
fn two_moons_match_reference() {
    let data = two_moons(600, 0.2, 1);
    for (eps, m) in [(0.1, 4), (0.15, 5), (0.2, 10), (0.3, 3), (0.05, 2)] {
        check_against_reference(&data, eps, m);
    }
    let c = dbscan_exact(&data, 0.15, 5, &DistanceSpec::Euclidean).unwrap();
    assert_eq!(c.k(), 2);
}

#[test]
fn sampling_approaches_exact_on_moons() {
    let data = two_moons(2000, 0.1, 2);
    let exact = dbscan_exact(&data, 0.15, 12, &DistanceSpec::Euclidean).unwrap();
    let params = SngParams::new(0.15, 6, 0.3).with_seed(3);
    let sampled = sng_dbscan(&data, &params).unwrap();
    let (ari, _) = scores(&sampled.labels(), &exact.labels(), NoisePolicy::OwnCluster).unwrap();
    assert_eq!(sampled.k(), 2);
    assert!(ari > 0.95, "{ari}");
}

fn data_strategy() -> impl Strategy<Value = Dataset> {
    (1usize..60, 1usize..4).prop_flat_map(|(n, dim)| {
        proptest::collection::vec(-2.0f64..2.0, n * dim).prop_map(move |v| Dataset::new(v, dim).unwrap())
    })
}

/// Clusters as sets of core indices, in canonical order.
fn core_partition(c: &Clustering) -> Vec<Vec<usize>> {
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, (a, r)) in c.assignment().iter().zip(c.roles()).enumerate() {
        if *r == Role::Core {
            groups.entry(a.unwrap()).or_default().push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

proptest! {
    #[test]
    fn exact_matches_reference(data in data_strategy(), eps in 0.05f64..1.5, m in 1usize..6) {
        let got = dbscan_exact(&data, eps, m, &DistanceSpec::Euclidean).unwrap();
        let (labels, roles) = reference_dbscan(&data, eps, m);
        prop_assert_eq!(got.labels(), labels);
        prop_assert_eq!(got.roles(), roles.as_slice());
    }

    #[test]
    fn full_rate_equals_exact(data in data_strategy(), eps in 0.05f64..1.5, m in 1usize..6, seed in any::<u64>()) {
        let exact = dbscan_exact(&data, eps, m, &DistanceSpec::Euclidean).unwrap();
        let sampled = sng_dbscan(&data, &SngParams::new(eps, m, 1.0).with_seed(seed)).unwrap();
        prop_assert_eq!(exact, sampled);
    }

    #[test]
    fn core_count_monotone(data in data_strategy(), eps in 0.05f64..1.0, m in 1usize..6) {
        let run = |e: f64, k: usize| dbscan_exact(&data, e, k, &DistanceSpec::Euclidean).unwrap().core_count();
        prop_assert!(run(eps, m + 1) <= run(eps, m));
        prop_assert!(run(eps * 1.5, m) >= run(eps, m));
    }

    #[test]
    fn isolated_point_is_noise(data in data_strategy(), eps in 0.05f64..1.0, m in 1usize..4, rate in 0.05f64..1.0) {
        let dim = data.dim();
        let mut v = data.values().to_vec();
        v.extend(std::iter::repeat_n(100.0, dim));
        let with_far = Dataset::new(v, dim).unwrap();
        let c = sng_dbscan(&with_far, &SngParams::new(eps, m, rate)).unwrap();
        prop_assert_eq!(c.assignment()[data.n()], None);
        prop_assert_eq!(c.roles()[data.n()], Role::Noise);
    }

    #[test]
    fn permutation_equivariant(data in data_strategy(), eps in 0.05f64..1.5, m in 1usize..5, shift in 0usize..1000) {
        let n = data.n();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + shift) % n).collect();
        // (i * 7 + shift) mod n is a bijection only when gcd(7, n) = 1
        prop_assume!(n % 7 != 0);
        let permuted = data.select(&perm).unwrap();
        let a = dbscan_exact(&data, eps, m, &DistanceSpec::Euclidean).unwrap();
        let b = dbscan_exact(&permuted, eps, m, &DistanceSpec::Euclidean).unwrap();
        // roles and the core partition do not depend on order; border ties may
        for (j, &i) in perm.iter().enumerate() {
            prop_assert_eq!(a.roles()[i], b.roles()[j]);
        }
        let mapped: Vec<Vec<usize>> = {
            let mut groups = core_partition(&b)
                .into_iter()
                .map(|g| { let mut g: Vec<usize> = g.into_iter().map(|j| perm[j]).collect(); g.sort(); g })
                .collect::<Vec<_>>();
            groups.sort();
            groups
        };
        prop_assert_eq!(core_partition(&a), mapped);
    }
}

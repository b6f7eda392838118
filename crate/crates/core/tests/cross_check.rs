//! Estimators and baselines checked against the brute-force oracle on the
//! small corpus.

mod common;

use cldiam::baseline::{delta_stepping, iterated_sssp_lower, sssp_diameter_upper};
use cldiam::diameter::approximate_diameter_detailed;
use cldiam::{cluster, cluster2, oracle, Algorithm, ClusterOptions, DeltaInit, DiameterOptions, Rng};

#[test]
fn estimate_is_conservative() {
    for (name, g) in common::small_corpus() {
        let exact = oracle::exact_diameter(&g).unwrap();
        for algorithm in [Algorithm::Cluster, Algorithm::Cluster2] {
            for seed in 0..5 {
                for tau in [1, 2, 8].map(|t: usize| t.min(g.node_count())) {
                    let opts = DiameterOptions { algorithm, ..Default::default() };
                    let (est, runs) = approximate_diameter_detailed(&g, tau, &Rng::new(seed), &opts).unwrap();
                    assert!(est.phi_approx >= exact, "{name} {algorithm:?} seed {seed} tau {tau}: {} < {exact}", est.phi_approx);
                    assert_eq!(runs.iter().map(|r| r.nodes.len()).sum::<usize>(), g.node_count());
                }
            }
        }
    }
}

#[test]
fn cluster_bounds_are_safe() {
    for (name, g) in common::small_corpus() {
        for init in [DeltaInit::MinWeight, DeltaInit::MeanWeight] {
            for seed in 0..4 {
                let opts = ClusterOptions { delta_init: init, ..Default::default() };
                for (which, result) in [
                    ("cluster", cluster(&g, 2, &Rng::new(seed), &opts).unwrap()),
                    ("cluster2", cluster2(&g, 2, &Rng::new(seed), &opts).unwrap()),
                ] {
                    for &c in &result.centers {
                        let dist = oracle::dijkstra(&g, c);
                        for (u, a) in result.assignment.iter().enumerate() {
                            if a.center == c {
                                assert!(
                                    a.d_orig >= dist[u],
                                    "{name} {which} {init:?} seed {seed} node {u}: {} < {}",
                                    a.d_orig,
                                    dist[u]
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn sssp_bounds_sandwich_the_diameter() {
    for (name, g) in common::small_corpus() {
        let exact = oracle::exact_diameter(&g).unwrap();
        let mean = g.mean_weight().unwrap();
        for source in [0, g.node_count() / 2, g.node_count() - 1] {
            let upper = sssp_diameter_upper(&g, source, mean).unwrap();
            let lower = iterated_sssp_lower(&g, source, 4).unwrap();
            assert!(lower <= exact && exact <= upper, "{name}: {lower} {exact} {upper}");
        }
    }
}

#[test]
fn delta_stepping_is_exact_on_the_corpus() {
    for (name, g) in common::small_corpus() {
        let min = g.min_weight().unwrap();
        let mean = g.mean_weight().unwrap();
        let exact = oracle::exact_diameter(&g).unwrap();
        for delta in [min, mean, 10.0 * mean, exact.max(min)] {
            let run = delta_stepping(&g, 0, delta).unwrap();
            assert_eq!(run.dist, oracle::dijkstra(&g, 0), "{name} delta {delta}");
        }
    }
}

#[test]
fn exact_diameter_is_max_eccentricity() {
    for (_, g) in common::small_corpus() {
        let by_hand = (0..g.node_count())
            .flat_map(|s| oracle::dijkstra(&g, s))
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        assert_eq!(oracle::exact_diameter(&g).unwrap(), by_hand);
    }
}

#[test]
fn iterated_lower_bound_finds_path_diameter() {
    let g = common::path(&[2.0, 3.0, 1.0, 4.0]);
    assert_eq!(iterated_sssp_lower(&g, 0, 1).unwrap(), 10.0);
    assert_eq!(iterated_sssp_lower(&g, 2, 2).unwrap(), 10.0);
}

mod common;

use common::*;
use louvain_core::graph::{generate, vertex_weights};
use louvain_core::mc::{louvain_aggregate, louvain_move};
use louvain_core::{louvain, modularity, LouvainParams};

fn serial() -> LouvainParams {
    LouvainParams::single_threaded()
}

#[test]
fn fixtures_reach_known_optima() {
    let r = louvain(&two_triangles(), &serial()).unwrap();
    assert!((r.modularity - 0.5).abs() < 1e-12);
    assert_eq!(r.membership.as_slice(), &[0, 0, 0, 1, 1, 1]);

    let r = louvain(&barbell(), &serial()).unwrap();
    assert!((r.modularity - 5.0 / 14.0).abs() < 1e-12);
    assert_eq!(r.num_communities(), 2);
}

#[test]
fn zero_passes_keeps_singletons() {
    let g = barbell();
    let p = LouvainParams { max_passes: 0, ..serial() };
    let r = louvain(&g, &p).unwrap();
    assert_eq!(r.membership.as_slice(), &[0, 1, 2, 3, 4, 5]);
    assert_eq!(r.passes, 0);
    assert_eq!(r.modularity, modularity(&g, &[0, 1, 2, 3, 4, 5]).unwrap());
}

#[test]
fn degenerate_graph_is_rejected() {
    assert!(matches!(
        louvain(&louvain_core::CsrGraph::empty(4), &serial()),
        Err(louvain_core::LouvainError::DegenerateGraph)
    ));
}

#[test]
fn result_modularity_matches_membership() {
    for seed in 0..10 {
        let g = planted(300, seed);
        for threads in [1, 3] {
            let r = louvain(&g, &LouvainParams { thread_count: threads, chunk_size: 16, ..serial() }).unwrap();
            assert!(r.membership.is_contiguous());
            assert!((r.modularity - modularity(&g, &r.membership).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn move_on_collapsed_graph_does_nothing() {
    let g = weighted(1, &[(0, 0, 6.0)]);
    let k = vertex_weights(&g);
    let mut c = vec![0];
    let mut sigma = k.clone();
    let mut flags = vec![true];
    let out = louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.01, &serial()).unwrap();
    assert_eq!((out.iterations, out.moves), (1, 0));
}

#[test]
fn move_merges_triangle() {
    let g = triangle();
    let k = vertex_weights(&g);
    let mut c = vec![0, 1, 2];
    let mut sigma = k.clone();
    let mut flags = vec![true; 3];
    louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.0, &serial()).unwrap();
    assert!(c.iter().all(|&x| x == c[0]));
    assert_eq!(sigma[c[0] as usize], 6.0);
}

#[test]
fn iteration_gain_tracks_modularity_drift() {
    for seed in 0..20 {
        let g = random(64, 200, seed);
        let k = vertex_weights(&g);
        let mut c: Vec<u32> = (0..64).collect();
        let mut sigma = k.clone();
        let mut flags = vec![true; 64];
        let p = LouvainParams { max_iterations: 1, ..serial() };
        for _ in 0..6 {
            let before = modularity(&g, &c).unwrap();
            let out = louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.0, &p).unwrap();
            let after = modularity(&g, &c).unwrap();
            assert!((out.iteration_gains[0] - (after - before)).abs() < 1e-6);
        }
    }
}

#[test]
fn sigma_stays_consistent_after_moves() {
    let g = random(200, 800, 3);
    let k = vertex_weights(&g);
    let mut c: Vec<u32> = (0..200).collect();
    let mut sigma = k.clone();
    let mut flags = vec![true; 200];
    let p = LouvainParams { thread_count: 4, chunk_size: 8, ..serial() };
    louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.0, &p).unwrap();
    let mut expected = vec![0.0; 200];
    for (i, &x) in c.iter().enumerate() {
        expected[x as usize] += k[i];
    }
    for (a, b) in sigma.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn aggregate_identity_and_barbell() {
    let g = barbell();
    let same = louvain_aggregate(&g, &[0, 1, 2, 3, 4, 5]).unwrap();
    assert_eq!(arc_multiset(&same), arc_multiset(&g));

    let agg = louvain_aggregate(&g, &[0, 0, 0, 1, 1, 1]).unwrap();
    assert_eq!(
        arc_multiset(&agg),
        vec![(0, 0, 6.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 6.0)]
    );
}

#[test]
fn aggregate_conserves_weight() {
    for seed in 0..30 {
        let g = random(100, 400, seed);
        let (c, _) = louvain_core::mc::renumber_communities(&generate::random_membership(100, 12, seed));
        let agg = louvain_aggregate(&g, &c).unwrap();
        assert_eq!(agg.total_weight(), g.total_weight());
        assert!(agg.is_symmetric());
        // Modularity is preserved by collapsing communities.
        let identity: Vec<u32> = (0..agg.num_vertices() as u32).collect();
        assert!((modularity(&agg, &identity).unwrap() - modularity(&g, &c).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn aggregate_rejects_sparse_ids() {
    assert!(louvain_aggregate(&triangle(), &[0, 2, 2]).is_err());
}

#[test]
fn threshold_scaling_and_low_shrink() {
    let r = louvain(&planted(600, 1), &LouvainParams { track_modularity: true, ..serial() }).unwrap();
    for (k, s) in r.pass_stats.iter().enumerate() {
        assert!((s.tolerance - 0.01 / 10f64.powi(k as i32)).abs() < 1e-18);
    }
    let last = r.pass_stats.last().unwrap();
    assert!(!last.aggregated);
    assert!(r.pass_stats[..r.passes - 1].iter().all(|s| s.aggregated));

    // One edge among ten vertices: 9 of 10 communities survive, above 0.8.
    let g = graph(10, &[(0, 1)]);
    let r = louvain(&g, &serial()).unwrap();
    assert_eq!(r.passes, 1);
    assert!(!r.pass_stats[0].aggregated);
    assert_eq!(r.num_communities(), 9);
}

#[test]
fn pruned_and_unpruned_runs_reach_similar_quality() {
    for seed in 0..10 {
        let g = planted(400, seed);
        let a = louvain(&g, &serial()).unwrap();
        let b = louvain(&g, &LouvainParams { pruning: false, ..serial() }).unwrap();
        assert!((a.modularity - b.modularity).abs() < 0.02, "seed {seed}");
    }
}

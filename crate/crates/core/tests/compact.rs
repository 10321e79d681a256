mod common;

use common::*;
use louvain_core::compact::{
    compact_louvain_aggregate, compact_louvain_move, PickLessSchedule, Probing, SwitchDegrees,
    ValueBits,
};
use louvain_core::graph::{generate, vertex_weights};
use louvain_core::mc::{louvain_aggregate, renumber_communities};
use louvain_core::{compact_louvain, louvain, modularity, CompactParams, LouvainParams};

fn serial() -> LouvainParams {
    LouvainParams::single_threaded()
}

#[test]
fn pick_less_schedule() {
    let s = PickLessSchedule::default();
    let active: Vec<usize> = (0..12).filter(|&l| s.is_pick_less(l)).collect();
    assert_eq!(active, vec![2, 6, 10]);
    let bad = CompactParams {
        pick_less: Some(PickLessSchedule { rho: 3 }),
        ..CompactParams::default()
    };
    assert!(compact_louvain(&triangle(), &serial(), &bad).is_err());
}

#[test]
fn fixtures_reach_known_optima() {
    for bits in [ValueBits::F32, ValueBits::F64] {
        let cp = CompactParams { value_bits: bits, ..CompactParams::default() };
        let r = compact_louvain(&two_triangles(), &serial(), &cp).unwrap();
        assert!((r.modularity - 0.5).abs() < 1e-12);
        let r = compact_louvain(&barbell(), &serial(), &cp).unwrap();
        assert!((r.modularity - 5.0 / 14.0).abs() < 1e-12);
        let r = compact_louvain(&barbell(), &LouvainParams { max_passes: 0, ..serial() }, &cp).unwrap();
        assert_eq!(r.membership.as_slice(), &[0, 1, 2, 3, 4, 5]);
    }
}

/// Edge 3–5 among `n` otherwise isolated vertices, decided in lockstep.
fn swap_gadget(n: usize, pick_less: Option<PickLessSchedule>) -> (Vec<u32>, usize) {
    let g = graph(n, &[(3, 5)]);
    let k = vertex_weights(&g);
    let mut c: Vec<u32> = (0..n as u32).collect();
    let mut sigma = k.clone();
    let mut flags = vec![true; n];
    let p = LouvainParams { max_iterations: 100, ..serial() };
    let cp = CompactParams { pick_less, lockstep: true, ..CompactParams::default() };
    let out = compact_louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.01, &p, &cp).unwrap();
    (c, out.iterations)
}

#[test]
fn lockstep_swap_cycles_without_pick_less() {
    let (c, iterations) = swap_gadget(8, None);
    assert_eq!(iterations, 100);
    assert_ne!(c[3], c[5]);
}

#[test]
fn pick_less_breaks_swap_cycle() {
    let (c, iterations) = swap_gadget(8, Some(PickLessSchedule::default()));
    assert_eq!(c[3], c[5]);
    // The lower id wins: vertex 5 moves into community 3.
    assert_eq!(c[3], 3);
    assert!(iterations < 100);
}

#[test]
fn serial_and_team_paths_agree() {
    for seed in 0..10 {
        let g = random(150, 1500, seed);
        let k = vertex_weights(&g);
        let run = |switch: usize| {
            let mut c: Vec<u32> = (0..150).collect();
            let mut sigma = k.clone();
            let mut flags = vec![true; 150];
            let cp = CompactParams {
                switch: SwitchDegrees { move_switch: switch, aggregate_switch: switch },
                value_bits: ValueBits::F64,
                ..CompactParams::default()
            };
            let out = compact_louvain_move(&g, &mut c, &k, &mut sigma, &mut flags, 0.0, &serial(), &cp).unwrap();
            (c, out.iteration_gains)
        };
        let serial_path = run(usize::MAX);
        let team_path = run(1);
        assert_eq!(serial_path, team_path, "seed {seed}");
    }
}

#[test]
fn compact_move_matches_mc_move_single_threaded() {
    for seed in 0..10 {
        let g = random(120, 600, seed);
        let k = vertex_weights(&g);
        let start = || ((0..120).collect::<Vec<u32>>(), k.clone(), vec![true; 120]);
        let cp = CompactParams { pick_less: None, value_bits: ValueBits::F64, ..CompactParams::default() };
        let (mut c1, mut s1, mut f1) = start();
        let (mut c2, mut s2, mut f2) = start();
        let a = louvain_core::mc::louvain_move(&g, &mut c1, &k, &mut s1, &mut f1, 0.0, &serial()).unwrap();
        let b = compact_louvain_move(&g, &mut c2, &k, &mut s2, &mut f2, 0.0, &serial(), &cp).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(a.iterations, b.iterations);
    }
}

#[test]
fn aggregation_matches_mc() {
    for seed in 0..20 {
        let g = random(200, 1000, seed);
        let (c, _) = renumber_communities(&generate::random_membership(200, 1 + seed as usize * 7, seed));
        let mc = louvain_aggregate(&g, &c).unwrap();
        for switch in [1, 128, usize::MAX] {
            let cp = CompactParams {
                switch: SwitchDegrees { move_switch: 64, aggregate_switch: switch },
                ..CompactParams::default()
            };
            let compact = compact_louvain_aggregate(&g, &c, &cp).unwrap();
            assert_eq!(arc_multiset(&compact), arc_multiset(&mc), "seed {seed} switch {switch}");
        }
    }
}

#[test]
fn aggregation_fixtures() {
    let cp = CompactParams::default();
    let g = barbell();
    let same = compact_louvain_aggregate(&g, &[0, 1, 2, 3, 4, 5], &cp).unwrap();
    assert_eq!(arc_multiset(&same), arc_multiset(&g));
    let agg = compact_louvain_aggregate(&g, &[0, 0, 0, 1, 1, 1], &cp).unwrap();
    assert_eq!(
        arc_multiset(&agg),
        vec![(0, 0, 6.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 6.0)]
    );
}

#[test]
fn every_probing_scheme_clusters() {
    let g = planted(500, 2);
    let reference = louvain(&g, &serial()).unwrap().modularity;
    for probing in [Probing::Linear, Probing::Quadratic, Probing::Double, Probing::QuadraticDouble] {
        let cp = CompactParams { probing, ..CompactParams::default() };
        let r = compact_louvain(&g, &serial(), &cp).unwrap();
        assert!((r.modularity - reference).abs() < 0.02, "{probing}");
        assert!((r.modularity - modularity(&g, &r.membership).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn multithreaded_runs_are_valid() {
    let g = planted(800, 4);
    let p = LouvainParams { thread_count: 4, chunk_size: 32, ..serial() };
    let cp = CompactParams {
        switch: SwitchDegrees { move_switch: 8, aggregate_switch: 16 },
        ..CompactParams::default()
    };
    let r = compact_louvain(&g, &p, &cp).unwrap();
    assert!(r.membership.is_contiguous());
    assert!(r.modularity > 0.3);
}

#![allow(dead_code)]

use louvain_core::graph::generate;
use louvain_core::{build_csr, CsrGraph, EdgeList};

pub fn graph(n: usize, edges: &[(u32, u32)]) -> CsrGraph {
    weighted(n, &edges.iter().map(|&(a, b)| (a, b, 1.0)).collect::<Vec<_>>())
}

pub fn weighted(n: usize, edges: &[(u32, u32, f32)]) -> CsrGraph {
    build_csr(&EdgeList::new(n, edges.to_vec()).unwrap(), true).unwrap()
}

pub fn triangle() -> CsrGraph {
    graph(3, &[(0, 1), (1, 2), (0, 2)])
}

pub fn single_edge() -> CsrGraph {
    graph(2, &[(0, 1)])
}

pub fn two_triangles() -> CsrGraph {
    graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
}

pub fn barbell() -> CsrGraph {
    graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
}

pub fn random(n: usize, edges: usize, seed: u64) -> CsrGraph {
    build_csr(&generate::random_graph(n, edges, 1..=9, seed), true).unwrap()
}

pub fn planted(n: usize, seed: u64) -> CsrGraph {
    build_csr(&generate::planted_partition(n, 10, 0.3, 0.01, seed).0, true).unwrap()
}

/// Arcs as sorted `(source, target, weight)` triples.
pub fn arc_multiset(g: &CsrGraph) -> Vec<(u32, u32, f64)> {
    let mut arcs: Vec<_> = (0..g.num_vertices())
        .flat_map(|i| g.neighbors(i).map(move |(j, w)| (i as u32, j, w as f64)))
        .collect();
    arcs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    arcs
}

pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    a.len() == b.len()
        && (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
}

//! Seeded synthetic graphs for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EdgeList, VertexId, Weight};

/// Planted-partition graph: `n` vertices split into `blocks` near-equal
/// groups, each pair joined with probability `p_in` inside a group and
/// `p_out` across groups. Returns the edge list (each edge once, unit
/// weights) and the planted block of every vertex.
pub fn planted_partition(
    n: usize,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> (EdgeList, Vec<u32>) {
    assert!(blocks >= 1 && n >= blocks);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let block_of: Vec<u32> = (0..n).map(|i| (i * blocks / n) as u32).collect();
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if block_of[i] == block_of[j] { p_in } else { p_out };
            if rng.gen_bool(p) {
                triples.push((i as VertexId, j as VertexId, 1.0));
            }
        }
    }
    (
        EdgeList {
            num_vertices: n,
            triples,
        },
        block_of,
    )
}

/// Uniform random multigraph-free graph with `edges` distinct undirected
/// edges (no self-loops) and integer weights drawn from `weights`.
pub fn random_graph(
    n: usize,
    edges: usize,
    weights: std::ops::RangeInclusive<u32>,
    seed: u64,
) -> EdgeList {
    assert!(n >= 2);
    let max_edges = n * (n - 1) / 2;
    let edges = edges.min(max_edges);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::with_capacity(edges);
    let mut triples = Vec::with_capacity(edges);
    while triples.len() < edges {
        let a = rng.gen_range(0..n as VertexId);
        let b = rng.gen_range(0..n as VertexId);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            triples.push((key.0, key.1, rng.gen_range(weights.clone()) as Weight));
        }
    }
    EdgeList {
        num_vertices: n,
        triples,
    }
}

/// Random graph with real weights uniform in `(0, max_weight]`.
pub fn random_real_graph(n: usize, edges: usize, max_weight: f64, seed: u64) -> EdgeList {
    let mut el = random_graph(n, edges, 1..=1, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    for t in &mut el.triples {
        // (0, max]: 1 - U[0,1) lies in (0, 1].
        t.2 = ((1.0 - rng.gen::<f64>()) * max_weight) as Weight;
    }
    el
}

/// `cliques` cliques of `size` vertices connected in a ring by single edges.
pub fn ring_of_cliques(cliques: usize, size: usize) -> EdgeList {
    let mut triples = Vec::new();
    for c in 0..cliques {
        let base = c * size;
        for i in 0..size {
            for j in i + 1..size {
                triples.push(((base + i) as VertexId, (base + j) as VertexId, 1.0));
            }
        }
        if cliques > 1 {
            let next = ((c + 1) % cliques) * size;
            triples.push((base as VertexId, next as VertexId, 1.0));
        }
    }
    EdgeList {
        num_vertices: cliques * size,
        triples,
    }
}

/// Random membership over `n` vertices with at most `k` communities.
pub fn random_membership(n: usize, k: usize, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k.max(1) as u32)).collect();
    labels.shuffle(&mut rng);
    labels
}

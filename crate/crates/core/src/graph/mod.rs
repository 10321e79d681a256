//! Weighted undirected graphs in compressed sparse row form.
//!
//! Vertex ids are 32-bit, stored edge weights are 32-bit floats, and every
//! accumulation (degrees, total weight) happens in 64-bit. An undirected edge
//! `{i, j}` with `i != j` is stored as the two arcs `(i, j, w)` and `(j, i, w)`;
//! a self-loop is stored as a single arc `(i, i, w)`. With that convention the
//! sum of all arc weights is `2m`, and a self-loop arc contributes its full
//! weight once to the weighted degree of its vertex. Aggregation produces
//! self-loops of exactly this kind (the arc weight of a super-vertex self-loop
//! is the community's internal weight), so the input graph follows the same
//! rule.

mod holey;
pub mod generate;
pub mod io;

pub use holey::{compact_holey, HoleyCsr};
pub(crate) use holey::split_by_offsets;

use rayon::prelude::*;

use crate::error::GraphError;

pub type VertexId = u32;
pub type Weight = f32;

/// Reserved id marking an empty hashtable slot; never a valid vertex.
pub const SENTINEL_ID: VertexId = VertexId::MAX;

/// A list of weighted `(source, target, weight)` triples over `num_vertices`
/// vertices, ids 0-based.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeList {
    pub num_vertices: usize,
    pub triples: Vec<(VertexId, VertexId, Weight)>,
}

impl EdgeList {
    pub fn new(
        num_vertices: usize,
        triples: Vec<(VertexId, VertexId, Weight)>,
    ) -> Result<Self, GraphError> {
        let el = Self {
            num_vertices,
            triples,
        };
        el.validate()?;
        Ok(el)
    }

    /// Checks id bounds and weight sanity. Errors carry the 1-based triple
    /// index as their line.
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.num_vertices >= SENTINEL_ID as usize {
            return Err(GraphError::TooManyVertices(self.num_vertices));
        }
        for (k, &(s, t, w)) in self.triples.iter().enumerate() {
            let line = k + 1;
            for id in [s, t] {
                if id as usize >= self.num_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        line,
                        id: id as u64,
                        num_vertices: self.num_vertices,
                    });
                }
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight { line });
            }
            if w < 0.0 {
                return Err(GraphError::NegativeWeight {
                    line,
                    weight: w as f64,
                });
            }
        }
        Ok(())
    }
}

/// Immutable weighted graph in CSR form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsrGraph {
    offsets: Vec<usize>,
    edges: Vec<VertexId>,
    weights: Vec<Weight>,
    total_weight: f64,
}

impl CsrGraph {
    /// Builds a graph from raw arrays, checking the offset and id invariants.
    /// Symmetry is not checked here; see [`CsrGraph::is_symmetric`].
    pub fn from_parts(
        offsets: Vec<usize>,
        edges: Vec<VertexId>,
        weights: Vec<Weight>,
    ) -> Result<Self, GraphError> {
        if offsets.is_empty() || offsets[0] != 0 {
            return Err(GraphError::MalformedCsr("offsets must start at 0".into()));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(GraphError::MalformedCsr("offsets must be non-decreasing".into()));
        }
        if *offsets.last().unwrap() != edges.len() || edges.len() != weights.len() {
            return Err(GraphError::MalformedCsr(
                "offsets, edges and weights disagree on arc count".into(),
            ));
        }
        let n = offsets.len() - 1;
        if n >= SENTINEL_ID as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        if let Some(&bad) = edges.iter().find(|&&j| j as usize >= n) {
            return Err(GraphError::MalformedCsr(format!("arc target {bad} >= {n}")));
        }
        Ok(Self::from_parts_unchecked(offsets, edges, weights))
    }

    pub(crate) fn from_parts_unchecked(
        offsets: Vec<usize>,
        edges: Vec<VertexId>,
        weights: Vec<Weight>,
    ) -> Self {
        let total_weight = sum_weights(&weights) / 2.0;
        Self {
            offsets,
            edges,
            weights,
            total_weight,
        }
    }

    /// A graph with `n` vertices and no arcs.
    pub fn empty(n: usize) -> Self {
        Self::from_parts_unchecked(vec![0; n + 1], Vec::new(), Vec::new())
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of stored arcs (`2|E|` minus the number of self-loops).
    #[inline]
    pub fn num_arcs(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    #[inline]
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Target ids and weights of the arcs leaving `i`.
    #[inline]
    pub fn arcs(&self, i: usize) -> (&[VertexId], &[Weight]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.edges[r.clone()], &self.weights[r])
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (VertexId, Weight)> + '_ {
        let (e, w) = self.arcs(i);
        e.iter().copied().zip(w.iter().copied())
    }

    /// `m`: half the sum of all arc weights.
    #[inline]
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn edges(&self) -> &[VertexId] {
        &self.edges
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn self_loop_count(&self) -> usize {
        (0..self.num_vertices())
            .map(|i| self.arcs(i).0.iter().filter(|&&j| j as usize == i).count())
            .sum()
    }

    /// Number of undirected edges: every off-diagonal pair of arcs counts
    /// once, every self-loop arc counts once.
    pub fn num_undirected_edges(&self) -> usize {
        let loops = self.self_loop_count();
        (self.num_arcs() - loops) / 2 + loops
    }

    /// True when the multiset of `(j, w)` leaving every `i` matches the
    /// multiset of `(i, w)` entering it.
    pub fn is_symmetric(&self) -> bool {
        let mut forward: Vec<(VertexId, VertexId, u32)> = Vec::with_capacity(self.num_arcs());
        let mut backward = Vec::with_capacity(self.num_arcs());
        for i in 0..self.num_vertices() {
            for (j, w) in self.neighbors(i) {
                forward.push((i as VertexId, j, w.to_bits()));
                backward.push((j, i as VertexId, w.to_bits()));
            }
        }
        forward.sort_unstable();
        backward.sort_unstable();
        forward == backward
    }

    /// Reuses this graph's buffers for new contents.
    pub(crate) fn assign_from(
        &mut self,
        fill: impl FnOnce(&mut Vec<usize>, &mut Vec<VertexId>, &mut Vec<Weight>),
    ) {
        self.offsets.clear();
        self.edges.clear();
        self.weights.clear();
        fill(&mut self.offsets, &mut self.edges, &mut self.weights);
        self.total_weight = sum_weights(&self.weights) / 2.0;
    }
}

fn sum_weights(weights: &[Weight]) -> f64 {
    // Chunked so the parallel reduction order does not depend on the pool.
    weights
        .par_chunks(1 << 14)
        .map(|c| c.iter().map(|&w| w as f64).sum::<f64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

/// Builds a CSR graph from an edge list.
///
/// Arcs are sorted by source, then target. With `symmetrize`, every
/// off-diagonal triple `(i, j, w)` also yields `(j, i, w)`; self-loops stay a
/// single arc. Parallel arcs between the same ordered pair are merged by
/// summing their weights.
pub fn build_csr(el: &EdgeList, symmetrize: bool) -> Result<CsrGraph, GraphError> {
    el.validate()?;
    let n = el.num_vertices;
    let mut arcs: Vec<(VertexId, VertexId, Weight)> =
        Vec::with_capacity(el.triples.len() * if symmetrize { 2 } else { 1 });
    for &(s, t, w) in &el.triples {
        arcs.push((s, t, w));
        if symmetrize && s != t {
            arcs.push((t, s, w));
        }
    }
    arcs.par_sort_unstable_by_key(|&(s, t, _)| (s, t));

    let mut offsets = vec![0usize; n + 1];
    let mut edges = Vec::with_capacity(arcs.len());
    let mut weights = Vec::with_capacity(arcs.len());
    let mut k = 0;
    while k < arcs.len() {
        let (s, t, _) = arcs[k];
        let mut sum = 0.0f64;
        while k < arcs.len() && arcs[k].0 == s && arcs[k].1 == t {
            sum += arcs[k].2 as f64;
            k += 1;
        }
        offsets[s as usize + 1] += 1;
        edges.push(t);
        weights.push(sum as Weight);
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    Ok(CsrGraph::from_parts_unchecked(offsets, edges, weights))
}

/// Emits every stored arc as a triple, in CSR order.
pub fn to_edge_list(g: &CsrGraph) -> EdgeList {
    let triples = (0..g.num_vertices())
        .flat_map(|i| g.neighbors(i).map(move |(j, w)| (i as VertexId, j, w)))
        .collect();
    EdgeList {
        num_vertices: g.num_vertices(),
        triples,
    }
}

/// Emits each undirected edge once (`i <= j`), the inverse of a symmetrizing
/// [`build_csr`] on a symmetric graph.
pub fn to_undirected_edge_list(g: &CsrGraph) -> EdgeList {
    let triples = (0..g.num_vertices())
        .flat_map(|i| {
            g.neighbors(i)
                .filter(move |&(j, _)| i <= j as usize)
                .map(move |(j, w)| (i as VertexId, j, w))
        })
        .collect();
    EdgeList {
        num_vertices: g.num_vertices(),
        triples,
    }
}

/// Weighted degree `K_i` of every vertex, in 64-bit.
pub fn vertex_weights(g: &CsrGraph) -> Vec<f64> {
    let mut k = vec![0.0; g.num_vertices()];
    vertex_weights_into(g, &mut k);
    k
}

pub(crate) fn vertex_weights_into(g: &CsrGraph, out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(i, k)| {
        *k = g.arcs(i).1.iter().map(|&w| w as f64).sum();
    });
}

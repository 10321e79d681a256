use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};

use rayon::prelude::*;

use super::{CsrGraph, VertexId, Weight};
use crate::scan::exclusive_scan_in_place;

/// Over-allocated CSR used as an aggregation target.
///
/// Each vertex owns the span `offsets[i]..offsets[i + 1]`, an upper bound on
/// the arcs it will receive. Writers append through a per-vertex atomic
/// cursor, so several threads may fill the same vertex concurrently.
#[derive(Debug, Default)]
pub struct HoleyCsr {
    offsets: Vec<usize>,
    fill: Vec<AtomicUsize>,
    edges: Vec<AtomicU32>,
    weights: Vec<AtomicU32>,
}

impl HoleyCsr {
    /// Builds a holey CSR from raw arrays. `edges`/`weights` must cover the
    /// last offset and every fill count must fit its span.
    pub fn from_parts(
        offsets: Vec<usize>,
        fill_counts: Vec<usize>,
        edges: Vec<VertexId>,
        weights: Vec<Weight>,
    ) -> Self {
        assert_eq!(offsets.len(), fill_counts.len() + 1);
        assert!(edges.len() >= *offsets.last().unwrap() && edges.len() == weights.len());
        for (i, &f) in fill_counts.iter().enumerate() {
            assert!(f <= offsets[i + 1] - offsets[i], "fill exceeds span of vertex {i}");
        }
        Self {
            offsets,
            fill: fill_counts.into_iter().map(AtomicUsize::new).collect(),
            edges: edges.into_iter().map(AtomicU32::new).collect(),
            weights: weights.into_iter().map(|w| AtomicU32::new(w.to_bits())).collect(),
        }
    }

    /// Resets to `spans.len()` vertices with the given per-vertex spans,
    /// keeping previously allocated storage when it is large enough.
    pub fn reset(&mut self, spans: &[usize]) {
        let n = spans.len();
        self.offsets.clear();
        self.offsets.extend_from_slice(spans);
        self.offsets.push(0);
        let total = exclusive_scan_in_place(&mut self.offsets);
        if self.fill.len() < n {
            self.fill.resize_with(n, AtomicUsize::default);
        }
        self.fill[..n]
            .par_iter()
            .for_each(|f| f.store(0, Ordering::Relaxed));
        if self.edges.len() < total {
            self.edges.resize_with(total, AtomicU32::default);
            self.weights.resize_with(total, AtomicU32::default);
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn span_start(&self, i: usize) -> usize {
        self.offsets[i]
    }

    #[inline]
    pub fn span(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    #[inline]
    pub fn fill_count(&self, i: usize) -> usize {
        self.fill[i].load(Ordering::Relaxed)
    }

    /// Appends arc `(i, j, w)`. Returns false when the span of `i` is full.
    #[inline]
    pub fn push(&self, i: usize, j: VertexId, w: Weight) -> bool {
        let k = self.fill[i].fetch_add(1, Ordering::Relaxed);
        if k >= self.span(i) {
            return false;
        }
        let at = self.offsets[i] + k;
        self.edges[at].store(j, Ordering::Relaxed);
        self.weights[at].store(w.to_bits(), Ordering::Relaxed);
        true
    }

    /// Removes the gaps into `out`, reusing its buffers.
    pub fn compact_into(&self, out: &mut CsrGraph) {
        let n = self.num_vertices();
        out.assign_from(|offsets, edges, weights| {
            offsets.extend((0..n).map(|i| self.fill_count(i).min(self.span(i))));
            offsets.push(0);
            let total = exclusive_scan_in_place(offsets);
            edges.resize(total, 0);
            weights.resize(total, 0.0);
            let dst = split_by_offsets(edges, offsets);
            let dst_w = split_by_offsets(weights, offsets);
            dst.into_par_iter()
                .zip(dst_w)
                .enumerate()
                .for_each(|(i, (e, w))| {
                    let src = self.offsets[i];
                    for k in 0..e.len() {
                        e[k] = self.edges[src + k].load(Ordering::Relaxed);
                        w[k] = f32::from_bits(self.weights[src + k].load(Ordering::Relaxed));
                    }
                });
        });
    }
}

/// Removes the gaps of a holey CSR, preserving arc order within each vertex.
pub fn compact_holey(h: &HoleyCsr) -> CsrGraph {
    let mut g = CsrGraph::default();
    h.compact_into(&mut g);
    g
}

/// Splits `data` into the per-vertex chunks described by `offsets`.
pub(crate) fn split_by_offsets<'a, T>(mut data: &'a mut [T], offsets: &[usize]) -> Vec<&'a mut [T]> {
    let mut parts = Vec::with_capacity(offsets.len().saturating_sub(1));
    for w in offsets.windows(2) {
        let (head, tail) = data.split_at_mut(w[1] - w[0]);
        parts.push(head);
        data = tail;
    }
    parts
}

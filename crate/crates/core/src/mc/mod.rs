//! Multicore Louvain with per-worker collision-free hashtables.

pub mod dendrogram;
mod farkv;

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::atomic::{atomic_f64_vec, atomic_u32_vec};
use crate::driver::{self, PassState, Phases};
use crate::error::LouvainError;
use crate::graph::{split_by_offsets, CsrGraph, HoleyCsr};
use crate::params::{LouvainParams, LouvainResult, MoveOutcome};
use crate::schedule::Executor;

pub use crate::scan::exclusive_scan;
pub use dendrogram::{lookup_dendrogram, renumber_communities};
pub use farkv::{best_community, scan_communities, FarKv};

/// Runs the multicore engine on `g`.
pub fn louvain(g: &CsrGraph, params: &LouvainParams) -> Result<LouvainResult, LouvainError> {
    driver::run(g, params, &mut McPhases::default())
}

/// One local-moving phase over plain arrays. `sigma` and `membership` are
/// updated in place and `unprocessed` receives the final pruning marks.
pub fn louvain_move(
    g: &CsrGraph,
    membership: &mut [u32],
    k: &[f64],
    sigma: &mut [f64],
    unprocessed: &mut [bool],
    tolerance: f64,
    params: &LouvainParams,
) -> Result<MoveOutcome, LouvainError> {
    let n = g.num_vertices();
    for len in [membership.len(), k.len(), sigma.len(), unprocessed.len()] {
        if len != n {
            return Err(LouvainError::MembershipLength { expected: n, got: len });
        }
    }
    params.validate()?;
    let c = atomic_u32_vec(membership.iter().copied());
    let s = atomic_f64_vec(sigma);
    let flags: Vec<AtomicBool> = unprocessed.iter().map(|&f| AtomicBool::new(f)).collect();
    let exec = Executor::new(params.thread_count, params.chunk_size)?;
    let mut phases = McPhases::default();
    phases.prepare(&exec, g);
    let state = PassState {
        graph: g,
        membership: &c,
        k,
        sigma: &s,
        unprocessed: &flags,
        tolerance,
        m: g.total_weight(),
    };
    let outcome = exec.install(|| phases.local_move(&exec, &state, params))?;
    for (dst, src) in membership.iter_mut().zip(&c) {
        *dst = src.load(Ordering::Relaxed);
    }
    for (dst, src) in sigma.iter_mut().zip(&s) {
        *dst = src.load();
    }
    for (dst, src) in unprocessed.iter_mut().zip(&flags) {
        *dst = src.load(Ordering::Relaxed);
    }
    Ok(outcome)
}

/// Builds the super-vertex graph of `g` under a contiguous membership.
pub fn louvain_aggregate(g: &CsrGraph, c: &[u32]) -> Result<CsrGraph, LouvainError> {
    let communities = check_contiguous(g, c)?;
    let exec = Executor::new(1, 2048)?;
    let mut phases = McPhases::default();
    phases.prepare(&exec, g);
    let mut out = CsrGraph::default();
    phases.aggregate(&exec, g, c, communities, &mut out)?;
    Ok(out)
}

pub(crate) fn check_contiguous(g: &CsrGraph, c: &[u32]) -> Result<usize, LouvainError> {
    if c.len() != g.num_vertices() {
        return Err(LouvainError::MembershipLength {
            expected: g.num_vertices(),
            got: c.len(),
        });
    }
    let communities = c.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
    if crate::quality::count_communities(c) != communities {
        return Err(LouvainError::Invariant("membership is not contiguous".into()));
    }
    Ok(communities)
}

/// Members of each community as a CSR: `(offsets, vertices)`. Members are
/// listed in ascending vertex order.
pub(crate) fn community_vertices(c: &[u32], communities: usize) -> (Vec<usize>, Vec<u32>) {
    let counts: Vec<AtomicUsize> = (0..communities).into_par_iter().map(|_| AtomicUsize::new(0)).collect();
    c.par_iter()
        .for_each(|&x| { counts[x as usize].fetch_add(1, Ordering::Relaxed); });
    let mut offsets: Vec<usize> = counts.iter().map(|a| a.load(Ordering::Relaxed)).collect();
    offsets.push(0);
    let total = crate::scan::exclusive_scan_in_place(&mut offsets);
    let cursor: Vec<AtomicUsize> = offsets[..communities]
        .par_iter()
        .map(|&o| AtomicUsize::new(o))
        .collect();
    let slots = atomic_u32_vec(std::iter::repeat_n(0, total));
    c.par_iter().enumerate().for_each(|(i, &x)| {
        let at = cursor[x as usize].fetch_add(1, Ordering::Relaxed);
        slots[at].store(i as u32, Ordering::Relaxed);
    });
    let mut vertices: Vec<u32> = slots.into_iter().map(AtomicU32::into_inner).collect();
    // Atomic placement leaves members in arbitrary order; sort for determinism.
    split_by_offsets(&mut vertices, &offsets)
        .into_par_iter()
        .for_each(|s| s.sort_unstable());
    (offsets, vertices)
}

/// Sum of member degrees per community, an upper bound on its aggregated
/// degree.
pub(crate) fn community_total_degrees(g: &CsrGraph, offsets: &[usize], vertices: &[u32]) -> Vec<usize> {
    offsets
        .par_windows(2)
        .map(|w| vertices[w[0]..w[1]].iter().map(|&i| g.degree(i as usize)).sum())
        .collect()
}

struct Worker {
    kv: Box<FarKv>,
    gain: f64,
    moves: usize,
    min_gain: f64,
    failed: Option<LouvainError>,
}

#[derive(Default)]
struct McPhases {
    workers: Vec<Worker>,
    holey: HoleyCsr,
}

impl Phases for McPhases {
    fn prepare(&mut self, exec: &Executor, g: &CsrGraph) {
        let n = g.num_vertices();
        self.workers = (0..exec.threads())
            .map(|_| Worker {
                kv: FarKv::new(n),
                gain: 0.0,
                moves: 0,
                min_gain: f64::INFINITY,
                failed: None,
            })
            .collect();
    }

    fn local_move(
        &mut self,
        exec: &Executor,
        state: &PassState<'_>,
        params: &LouvainParams,
    ) -> Result<MoveOutcome, LouvainError> {
        let n = state.graph.num_vertices();
        let mut outcome = MoveOutcome::default();
        let mut min_gain = f64::INFINITY;
        for _ in 0..params.max_iterations {
            for w in &mut self.workers {
                w.gain = 0.0;
                w.moves = 0;
            }
            exec.for_each_chunk(n, &mut self.workers, |w, range| {
                for i in range {
                    move_vertex(w, state, i, params.pruning);
                }
            });
            let gain: f64 = self.workers.iter().map(|w| w.gain).sum();
            outcome.moves += self.workers.iter().map(|w| w.moves).sum::<usize>();
            min_gain = self.workers.iter().map(|w| w.min_gain).fold(min_gain, f64::min);
            outcome.iterations += 1;
            outcome.iteration_gains.push(gain);
            if gain <= state.tolerance {
                break;
            }
        }
        for w in &mut self.workers {
            w.min_gain = f64::INFINITY;
        }
        outcome.min_accepted_gain = min_gain.is_finite().then_some(min_gain);
        Ok(outcome)
    }

    fn aggregate(
        &mut self,
        exec: &Executor,
        g: &CsrGraph,
        c: &[u32],
        communities: usize,
        out: &mut CsrGraph,
    ) -> Result<(), LouvainError> {
        let (offsets, vertices) = community_vertices(c, communities);
        let spans = community_total_degrees(g, &offsets, &vertices);
        self.holey.reset(&spans);
        let holey = &self.holey;
        exec.for_each_chunk(communities, &mut self.workers, |w, range| {
            for cc in range {
                w.kv.clear();
                for &i in &vertices[offsets[cc]..offsets[cc + 1]] {
                    scan_communities(&mut w.kv, g, c, i as usize, true);
                }
                for (d, weight) in w.kv.iter() {
                    if !holey.push(cc, d, weight as f32) && w.failed.is_none() {
                        w.failed = Some(LouvainError::Invariant(format!(
                            "aggregated degree of community {cc} exceeds its span"
                        )));
                    }
                }
            }
        });
        if let Some(e) = self.workers.iter_mut().find_map(|w| w.failed.take()) {
            return Err(e);
        }
        self.holey.compact_into(out);
        Ok(())
    }
}

#[inline]
fn move_vertex(w: &mut Worker, s: &PassState<'_>, i: usize, pruning: bool) {
    if pruning && !s.unprocessed[i].swap(false, Ordering::Relaxed) {
        return;
    }
    let c_i = s.membership[i].load(Ordering::Relaxed);
    w.kv.clear();
    scan_communities(&mut w.kv, s.graph, s.membership, i, false);
    let (best, gain) = best_community(&w.kv, c_i, s.k[i], s.sigma, s.m);
    if best == c_i || gain <= 0.0 {
        return;
    }
    let k_i = s.k[i];
    s.sigma[c_i as usize].fetch_add(-k_i);
    s.sigma[best as usize].fetch_add(k_i);
    s.membership[i].store(best, Ordering::Relaxed);
    w.gain += gain;
    w.moves += 1;
    w.min_gain = w.min_gain.min(gain);
    if pruning {
        for &j in s.graph.arcs(i).0 {
            s.unprocessed[j as usize].store(true, Ordering::Relaxed);
        }
    }
}

//! Louvain with per-vertex open-addressing hashtables in one `O(|E|)` slab.
//!
//! Vertices and communities below a degree threshold are scanned by a single
//! worker; larger ones are scanned cooperatively through the shared-access
//! accumulate path. Every `ρ` iterations a pick-less round only allows moves
//! to lower community ids, which breaks symmetric swap cycles.

pub mod hashtable;

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};

use rayon::prelude::*;

use crate::atomic::{atomic_f64_vec, atomic_u32_vec, ReadAt};
use crate::driver::{self, PassState, Phases};
use crate::error::LouvainError;
use crate::graph::{CsrGraph, HoleyCsr, SENTINEL_ID};
use crate::mc::{check_contiguous, community_total_degrees, community_vertices};
use crate::params::{LouvainParams, LouvainResult, MoveOutcome};
use crate::quality::delta_modularity;
use crate::schedule::Executor;

pub use hashtable::{HashSlab, Probing, SlotValue, TableView, ValueBits};

/// Pick-less rounds happen at iterations `l` with `(l + ρ/2) mod ρ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PickLessSchedule {
    pub rho: usize,
}

impl Default for PickLessSchedule {
    fn default() -> Self {
        Self { rho: 4 }
    }
}

impl PickLessSchedule {
    /// Whether 0-based iteration `l` is a pick-less round.
    pub fn is_pick_less(&self, l: usize) -> bool {
        self.rho > 0 && (l + self.rho / 2).is_multiple_of(self.rho)
    }
}

/// Degrees at or above which a vertex or community is scanned
/// cooperatively instead of serially.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwitchDegrees {
    pub move_switch: usize,
    pub aggregate_switch: usize,
}

impl Default for SwitchDegrees {
    fn default() -> Self {
        Self {
            move_switch: 64,
            aggregate_switch: 128,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompactParams {
    /// `None` disables pick-less rounds.
    pub pick_less: Option<PickLessSchedule>,
    pub switch: SwitchDegrees,
    pub probing: Probing,
    pub value_bits: ValueBits,
    /// Decide every vertex against the same snapshot, then apply all moves
    /// at once. Only meant for reproducing swap cycles in tests.
    pub lockstep: bool,
}

impl Default for CompactParams {
    fn default() -> Self {
        Self {
            pick_less: Some(PickLessSchedule::default()),
            switch: SwitchDegrees::default(),
            probing: Probing::default(),
            value_bits: ValueBits::default(),
            lockstep: false,
        }
    }
}

impl CompactParams {
    pub fn validate(&self) -> Result<(), LouvainError> {
        if self.pick_less.is_some_and(|s| s.rho < 2 || s.rho % 2 != 0) {
            return Err(LouvainError::InvalidParams(
                "pick-less period must be even and at least 2".into(),
            ));
        }
        if self.switch.move_switch < 1 || self.switch.aggregate_switch < 1 {
            return Err(LouvainError::InvalidParams("switch degrees must be at least 1".into()));
        }
        Ok(())
    }
}

/// Runs the compact engine on `g`.
pub fn compact_louvain(
    g: &CsrGraph,
    params: &LouvainParams,
    cp: &CompactParams,
) -> Result<LouvainResult, LouvainError> {
    cp.validate()?;
    match cp.value_bits {
        ValueBits::F32 => driver::run(g, params, &mut CompactPhases::<f32>::new(*cp)),
        ValueBits::F64 => driver::run(g, params, &mut CompactPhases::<f64>::new(*cp)),
    }
}

/// One local-moving phase over plain arrays; see [`crate::mc::louvain_move`].
#[allow(clippy::too_many_arguments)]
pub fn compact_louvain_move(
    g: &CsrGraph,
    membership: &mut [u32],
    k: &[f64],
    sigma: &mut [f64],
    unprocessed: &mut [bool],
    tolerance: f64,
    params: &LouvainParams,
    cp: &CompactParams,
) -> Result<MoveOutcome, LouvainError> {
    match cp.value_bits {
        ValueBits::F32 => move_with::<f32>(g, membership, k, sigma, unprocessed, tolerance, params, cp),
        ValueBits::F64 => move_with::<f64>(g, membership, k, sigma, unprocessed, tolerance, params, cp),
    }
}

#[allow(clippy::too_many_arguments)]
fn move_with<V: SlotValue>(
    g: &CsrGraph,
    membership: &mut [u32],
    k: &[f64],
    sigma: &mut [f64],
    unprocessed: &mut [bool],
    tolerance: f64,
    params: &LouvainParams,
    cp: &CompactParams,
) -> Result<MoveOutcome, LouvainError> {
    let n = g.num_vertices();
    for len in [membership.len(), k.len(), sigma.len(), unprocessed.len()] {
        if len != n {
            return Err(LouvainError::MembershipLength { expected: n, got: len });
        }
    }
    params.validate()?;
    cp.validate()?;
    let c = atomic_u32_vec(membership.iter().copied());
    let s = atomic_f64_vec(sigma);
    let flags: Vec<AtomicBool> = unprocessed.iter().map(|&f| AtomicBool::new(f)).collect();
    let exec = Executor::new(params.thread_count, params.chunk_size)?;
    let mut phases = CompactPhases::<V>::new(*cp);
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
pub fn compact_louvain_aggregate(
    g: &CsrGraph,
    c: &[u32],
    cp: &CompactParams,
) -> Result<CsrGraph, LouvainError> {
    fn with<V: SlotValue>(g: &CsrGraph, c: &[u32], cp: &CompactParams, communities: usize) -> Result<CsrGraph, LouvainError> {
        let exec = Executor::new(1, 2048)?;
        let mut phases = CompactPhases::<V>::new(*cp);
        phases.prepare(&exec, g);
        let mut out = CsrGraph::default();
        exec.install(|| phases.aggregate(&exec, g, c, communities, &mut out))?;
        Ok(out)
    }
    let communities = check_contiguous(g, c)?;
    match cp.value_bits {
        ValueBits::F32 => with::<f32>(g, c, cp, communities),
        ValueBits::F64 => with::<f64>(g, c, cp, communities),
    }
}

#[derive(Default)]
struct Worker {
    gain: f64,
    moves: usize,
    min_gain: f64,
    failed: Option<LouvainError>,
}

impl Worker {
    fn fail(&mut self, e: LouvainError) {
        self.failed.get_or_insert(e);
    }
}

struct CompactPhases<V: SlotValue> {
    cp: CompactParams,
    slab: HashSlab<V>,
    workers: Vec<Worker>,
    holey: HoleyCsr,
    decisions: Vec<AtomicU32>,
}

impl<V: SlotValue> CompactPhases<V> {
    fn new(cp: CompactParams) -> Self {
        Self {
            cp,
            slab: HashSlab::new(0, cp.probing),
            workers: Vec::new(),
            holey: HoleyCsr::default(),
            decisions: Vec::new(),
        }
    }

    fn take_failure(&mut self) -> Result<(), LouvainError> {
        match self.workers.iter_mut().find_map(|w| w.failed.take()) {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Keeps `cand` over `best` when it has a larger positive gain, or equal
/// gain and a lower id.
#[inline]
fn better(best: (u32, f64), cand: (u32, f64)) -> (u32, f64) {
    if cand.1 > best.1 || (cand.1 == best.1 && cand.0 < best.0) {
        cand
    } else {
        best
    }
}

/// Best move of vertex `i`, or `None` to stay.
fn decide<V: SlotValue>(
    slab: &HashSlab<V>,
    s: &PassState<'_>,
    i: usize,
    move_switch: usize,
    pick_less: bool,
) -> Result<Option<(u32, f64)>, LouvainError> {
    let g = s.graph;
    let d = g.degree(i);
    let c_i = s.membership[i].load(Ordering::Relaxed);
    let view = slab.view(2 * g.offset(i), d);
    let (edges, weights) = g.arcs(i);
    let team = d >= move_switch;
    if team {
        view.par_clear();
        edges
            .par_iter()
            .zip(weights)
            .filter(|&(&j, &w)| j as usize != i && w > 0.0)
            .try_for_each(|(&j, &w)| view.accumulate(s.membership.read(j as usize), w as f64, true).map(|_| ()))?;
    } else {
        view.clear();
        for (&j, &w) in edges.iter().zip(weights) {
            if j as usize != i && w > 0.0 {
                view.accumulate(s.membership.read(j as usize), w as f64, false)?;
            }
        }
    }
    let k_i = s.k[i];
    let k_i_to_d = view.get(c_i);
    let sigma_d = s.sigma.read(c_i as usize);
    let gain_of = |(c, k_i_to_c): (u32, f64)| {
        (c, delta_modularity(k_i_to_c, k_i_to_d, k_i, s.sigma.read(c as usize), sigma_d, s.m))
    };
    let none = (SENTINEL_ID, 0.0);
    let (best, gain) = if team {
        (0..view.slots())
            .into_par_iter()
            .filter_map(|slot| view.entry_at(slot))
            .filter(|&(c, _)| c != c_i)
            .map(gain_of)
            .filter(|&(_, gain)| gain > 0.0)
            .reduce(|| none, better)
    } else {
        view.entries()
            .filter(|&(c, _)| c != c_i)
            .map(gain_of)
            .filter(|&(_, gain)| gain > 0.0)
            .fold(none, better)
    };
    if best == SENTINEL_ID || (pick_less && best > c_i) {
        return Ok(None);
    }
    Ok(Some((best, gain)))
}

fn apply(w: &mut Worker, s: &PassState<'_>, i: usize, from: u32, to: u32, gain: f64, pruning: bool) {
    let k_i = s.k[i];
    s.sigma[from as usize].fetch_add(-k_i);
    s.sigma[to as usize].fetch_add(k_i);
    s.membership[i].store(to, Ordering::Relaxed);
    w.gain += gain;
    w.moves += 1;
    w.min_gain = w.min_gain.min(gain);
    if pruning {
        for &j in s.graph.arcs(i).0 {
            s.unprocessed[j as usize].store(true, Ordering::Relaxed);
        }
    }
}

impl<V: SlotValue> Phases for CompactPhases<V> {
    fn prepare(&mut self, exec: &Executor, g: &CsrGraph) {
        self.slab = HashSlab::new(2 * g.num_arcs(), self.cp.probing);
        self.workers = (0..exec.threads())
            .map(|_| Worker {
                min_gain: f64::INFINITY,
                ..Worker::default()
            })
            .collect();
        if self.cp.lockstep {
            self.decisions = atomic_u32_vec(std::iter::repeat_n(SENTINEL_ID, g.num_vertices()));
        }
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
        let pruning = params.pruning;
        let move_switch = self.cp.switch.move_switch;
        for l in 0..params.max_iterations {
            let pl = self.cp.pick_less.is_some_and(|s| s.is_pick_less(l));
            for w in &mut self.workers {
                w.gain = 0.0;
                w.moves = 0;
            }
            let slab = &self.slab;
            if self.cp.lockstep {
                let decisions = &self.decisions[..n];
                exec.for_each_chunk(n, &mut self.workers, |w, range| {
                    for i in range {
                        decisions[i].store(SENTINEL_ID, Ordering::Relaxed);
                        if pruning && !state.unprocessed[i].swap(false, Ordering::Relaxed) {
                            continue;
                        }
                        match decide(slab, state, i, move_switch, pl) {
                            Ok(Some((to, gain))) => {
                                decisions[i].store(to, Ordering::Relaxed);
                                w.gain += gain;
                                w.moves += 1;
                                w.min_gain = w.min_gain.min(gain);
                            }
                            Ok(None) => {}
                            Err(e) => w.fail(e),
                        }
                    }
                });
                exec.for_each_chunk(n, &mut self.workers, |_, range| {
                    for i in range {
                        let to = decisions[i].load(Ordering::Relaxed);
                        if to == SENTINEL_ID {
                            continue;
                        }
                        let from = state.membership[i].load(Ordering::Relaxed);
                        let k_i = state.k[i];
                        state.sigma[from as usize].fetch_add(-k_i);
                        state.sigma[to as usize].fetch_add(k_i);
                        state.membership[i].store(to, Ordering::Relaxed);
                        if pruning {
                            for &j in state.graph.arcs(i).0 {
                                state.unprocessed[j as usize].store(true, Ordering::Relaxed);
                            }
                        }
                    }
                });
            } else {
                exec.for_each_chunk(n, &mut self.workers, |w, range| {
                    for i in range {
                        if pruning && !state.unprocessed[i].swap(false, Ordering::Relaxed) {
                            continue;
                        }
                        let from = state.membership[i].load(Ordering::Relaxed);
                        match decide(slab, state, i, move_switch, pl) {
                            Ok(Some((to, gain))) => apply(w, state, i, from, to, gain, pruning),
                            Ok(None) => {}
                            Err(e) => w.fail(e),
                        }
                    }
                });
            }
            self.take_failure()?;
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
        let (slab, holey) = (&self.slab, &self.holey);
        let aggregate_switch = self.cp.switch.aggregate_switch;
        exec.for_each_chunk(communities, &mut self.workers, |w, range| {
            for cc in range {
                let d = spans[cc];
                let view = slab.view(2 * holey.span_start(cc), d);
                let members = &vertices[offsets[cc]..offsets[cc + 1]];
                let scanned = if d >= aggregate_switch {
                    view.par_clear();
                    members.par_iter().try_for_each(|&i| {
                        let (edges, weights) = g.arcs(i as usize);
                        for (&j, &wt) in edges.iter().zip(weights) {
                            if wt > 0.0 {
                                view.accumulate(c[j as usize], wt as f64, true)?;
                            }
                        }
                        Ok(())
                    })
                } else {
                    view.clear();
                    members.iter().try_for_each(|&i| {
                        let (edges, weights) = g.arcs(i as usize);
                        for (&j, &wt) in edges.iter().zip(weights) {
                            if wt > 0.0 {
                                view.accumulate(c[j as usize], wt as f64, false)?;
                            }
                        }
                        Ok(())
                    })
                };
                if let Err(e) = scanned {
                    w.fail(e);
                    continue;
                }
                for (dst, weight) in view.entries() {
                    if !holey.push(cc, dst, weight as f32) {
                        w.fail(LouvainError::Invariant(format!(
                            "aggregated degree of community {cc} exceeds its span"
                        )));
                    }
                }
            }
        });
        self.take_failure()?;
        self.holey.compact_into(out);
        Ok(())
    }
}

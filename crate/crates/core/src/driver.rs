//! The pass loop shared by both engines: reset, local-move, convergence and
//! shrink checks, renumber, dendrogram lookup, aggregate, tolerance scaling.

use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::atomic::AtomicF64;
use crate::error::LouvainError;
use crate::graph::{vertex_weights_into, CsrGraph};
use crate::mc::dendrogram::{lookup_in_place, renumber_in_place};
use crate::params::{LouvainParams, LouvainResult, MoveOutcome, PassStats, PhaseTimes};
use crate::quality::{self, count_communities, Membership};
use crate::schedule::Executor;

/// Per-pass working state handed to the local-moving phase.
pub(crate) struct PassState<'a> {
    pub graph: &'a CsrGraph,
    pub membership: &'a [AtomicU32],
    pub k: &'a [f64],
    pub sigma: &'a [AtomicF64],
    pub unprocessed: &'a [AtomicBool],
    pub tolerance: f64,
    pub m: f64,
}

pub(crate) trait Phases {
    /// Called once before the first pass with the input size.
    fn prepare(&mut self, exec: &Executor, g: &CsrGraph);

    fn local_move(
        &mut self,
        exec: &Executor,
        state: &PassState<'_>,
        params: &LouvainParams,
    ) -> Result<MoveOutcome, LouvainError>;

    /// Builds the super-vertex graph of `g` under the contiguous membership
    /// `c` with `communities` ids into `out`.
    fn aggregate(
        &mut self,
        exec: &Executor,
        g: &CsrGraph,
        c: &[u32],
        communities: usize,
        out: &mut CsrGraph,
    ) -> Result<(), LouvainError>;
}

pub(crate) fn run<P: Phases + Send>(
    g: &CsrGraph,
    params: &LouvainParams,
    phases: &mut P,
) -> Result<LouvainResult, LouvainError> {
    params.validate()?;
    if g.total_weight() <= 0.0 {
        return Err(LouvainError::DegenerateGraph);
    }
    let exec = Executor::new(params.thread_count, params.chunk_size)?;
    let mut result = exec.install(|| run_passes(&exec, g, params, phases))?;
    result.modularity = quality::modularity(g, &result.membership)?;
    Ok(result)
}

fn run_passes<P: Phases>(
    exec: &Executor,
    g: &CsrGraph,
    params: &LouvainParams,
    phases: &mut P,
) -> Result<LouvainResult, LouvainError> {
    let start = Instant::now();
    let mut excluded = Duration::ZERO;
    let mut times = PhaseTimes::default();
    let n = g.num_vertices();

    let mut top: Vec<u32> = (0..n as u32).into_par_iter().collect();
    let mut k = vec![0.0f64; n];
    let sigma: Vec<AtomicF64> = (0..n).into_par_iter().map(|_| AtomicF64::new(0.0)).collect();
    let membership: Vec<AtomicU32> = (0..n).into_par_iter().map(|_| AtomicU32::new(0)).collect();
    let unprocessed: Vec<AtomicBool> = (0..n).into_par_iter().map(|_| AtomicBool::new(true)).collect();
    let mut snapshot: Vec<u32> = vec![0; n];
    // Ping-pong super-vertex graphs; `current` indexes the pass input, `None`
    // meaning the caller's graph.
    let mut buffers = [CsrGraph::default(), CsrGraph::default()];
    let mut current: Option<usize> = None;
    phases.prepare(exec, g);

    let mut tolerance = params.initial_tolerance;
    let mut stats: Vec<PassStats> = Vec::new();

    for pass in 0..params.max_passes {
        let pass_start = Instant::now();
        let target = current.map_or(0, |b| 1 - b);
        let (gp, out) = match current {
            None => (g, &mut buffers[0]),
            Some(b) => {
                let (lo, hi) = buffers.split_at_mut(1);
                if b == 0 {
                    (&lo[0], &mut hi[0])
                } else {
                    (&hi[0], &mut lo[0])
                }
            }
        };
        let np = gp.num_vertices();
        vertex_weights_into(gp, &mut k[..np]);
        sigma[..np]
            .par_iter()
            .zip(&k[..np])
            .for_each(|(s, &ki)| s.store(ki));
        membership[..np]
            .par_iter()
            .enumerate()
            .for_each(|(i, c)| c.store(i as u32, Ordering::Relaxed));
        unprocessed[..np]
            .par_iter()
            .for_each(|f| f.store(true, Ordering::Relaxed));
        log::debug!("pass {pass}: {np} vertices, tolerance {tolerance:e}");

        let state = PassState {
            graph: gp,
            membership: &membership[..np],
            k: &k[..np],
            sigma: &sigma[..np],
            unprocessed: &unprocessed[..np],
            tolerance,
            m: gp.total_weight(),
        };
        let move_start = Instant::now();
        let outcome = phases.local_move(exec, &state, params)?;
        times.local_moving += move_start.elapsed();

        let cp = &mut snapshot[..np];
        cp.par_iter_mut()
            .zip(&membership[..np])
            .for_each(|(s, c)| *s = c.load(Ordering::Relaxed));
        let communities = count_communities(cp);
        let mut pass_stats = PassStats {
            tolerance,
            iterations: outcome.iterations,
            vertices: np,
            communities,
            iteration_gains: outcome.iteration_gains,
            moves: outcome.moves,
            min_accepted_gain: outcome.min_accepted_gain,
            aggregated: false,
            modularity: None,
            time: Duration::ZERO,
        };
        let converged = outcome.iterations <= 1;
        let low_shrink = communities as f64 / np as f64 > params.aggregation_tolerance;
        let count = renumber_in_place(cp);
        lookup_in_place(&mut top, cp)?;

        if !(converged || low_shrink) {
            let agg_start = Instant::now();
            phases.aggregate(exec, gp, cp, count, out)?;
            times.aggregation += agg_start.elapsed();
            pass_stats.aggregated = true;
            current = Some(target);
        }
        pass_stats.time = pass_start.elapsed();
        if params.track_modularity {
            let t = Instant::now();
            pass_stats.modularity = Some(quality::modularity(g, &top)?);
            excluded += t.elapsed();
        }
        log::debug!(
            "pass {pass}: {} iterations, {communities} communities, aggregated {}",
            pass_stats.iterations,
            pass_stats.aggregated
        );
        let stop = !pass_stats.aggregated;
        stats.push(pass_stats);
        if stop {
            break;
        }
        tolerance /= params.tolerance_drop;
    }

    renumber_in_place(&mut top);
    let total = start.elapsed().saturating_sub(excluded);
    times.other = total.saturating_sub(times.local_moving + times.aggregation);
    Ok(LouvainResult {
        membership: Membership::from(top),
        passes: stats.len(),
        iterations_per_pass: stats.iter().map(|s| s.iterations).collect(),
        modularity: f64::NAN,
        phase_times: times,
        pass_times: stats.iter().map(|s| s.time).collect(),
        pass_stats: stats,
    })
}

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use clap::{Args, ValueEnum};
use louvain_core::compact::{PickLessSchedule, Probing, SwitchDegrees, ValueBits};
use louvain_core::oracle::sequential_louvain;
use louvain_core::{
    compact_louvain, louvain, modularity, CompactParams, CsrGraph, LouvainError, LouvainParams,
    LouvainResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Mc,
    Compact,
    Sequential,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Mc => "mc",
            Engine::Compact => "compact",
            Engine::Sequential => "sequential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbingArg {
    Linear,
    Quadratic,
    Double,
    QuadraticDouble,
}

impl From<ProbingArg> for Probing {
    fn from(p: ProbingArg) -> Self {
        match p {
            ProbingArg::Linear => Probing::Linear,
            ProbingArg::Quadratic => Probing::Quadratic,
            ProbingArg::Double => Probing::Double,
            ProbingArg::QuadraticDouble => Probing::QuadraticDouble,
        }
    }
}

/// Engine selection and tuning flags shared by `detect` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value = "mc")]
    pub engine: Engine,
    #[arg(long, default_value_t = 10)]
    pub max_passes: usize,
    #[arg(long, default_value_t = 20)]
    pub max_iterations: usize,
    /// Convergence tolerance of the first pass.
    #[arg(long, default_value_t = 0.01)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 10.0)]
    pub tolerance_drop: f64,
    #[arg(long, default_value_t = 0.8)]
    pub aggregation_tolerance: f64,
    #[arg(long, default_value_t = 2048)]
    pub chunk_size: usize,
    /// Process every vertex in every iteration.
    #[arg(long)]
    pub no_pruning: bool,
    /// Pick-less period for the compact engine; 0 disables it.
    #[arg(long, default_value_t = 4)]
    pub pl_period: usize,
    #[arg(long, default_value_t = 64)]
    pub switch_move: usize,
    #[arg(long, default_value_t = 128)]
    pub switch_aggregate: usize,
    #[arg(long, value_enum, default_value = "quadratic-double")]
    pub probing: ProbingArg,
    #[arg(long, default_value = "32", value_parser = ["32", "64"])]
    pub value_bits: String,
}

impl EngineArgs {
    pub fn params(&self, threads: usize) -> LouvainParams {
        LouvainParams {
            max_passes: self.max_passes,
            max_iterations: self.max_iterations,
            initial_tolerance: self.tolerance,
            tolerance_drop: self.tolerance_drop,
            aggregation_tolerance: self.aggregation_tolerance,
            thread_count: threads,
            chunk_size: self.chunk_size,
            pruning: !self.no_pruning,
            track_modularity: false,
        }
    }

    pub fn compact(&self) -> CompactParams {
        CompactParams {
            pick_less: (self.pl_period > 0).then_some(PickLessSchedule { rho: self.pl_period }),
            switch: SwitchDegrees {
                move_switch: self.switch_move,
                aggregate_switch: self.switch_aggregate,
            },
            probing: self.probing.into(),
            value_bits: if self.value_bits == "64" { ValueBits::F64 } else { ValueBits::F32 },
            lockstep: false,
        }
    }

    pub fn run(&self, g: &CsrGraph, threads: usize) -> Result<LouvainResult, LouvainError> {
        let p = self.params(threads);
        match self.engine {
            Engine::Mc => louvain(g, &p),
            Engine::Compact => compact_louvain(g, &p, &self.compact()),
            Engine::Sequential => sequential_louvain(g, &p),
        }
    }

    fn echo(&self, out: &mut String, threads: usize) {
        let p = self.params(threads);
        let _ = writeln!(out, "engine={}", self.engine.name());
        let _ = writeln!(out, "params.threads={}", p.thread_count);
        let _ = writeln!(out, "params.max_passes={}", p.max_passes);
        let _ = writeln!(out, "params.max_iterations={}", p.max_iterations);
        let _ = writeln!(out, "params.tolerance={}", p.initial_tolerance);
        let _ = writeln!(out, "params.tolerance_drop={}", p.tolerance_drop);
        let _ = writeln!(out, "params.aggregation_tolerance={}", p.aggregation_tolerance);
        let _ = writeln!(out, "params.chunk_size={}", p.chunk_size);
        let _ = writeln!(out, "params.pruning={}", p.pruning);
        if self.engine == Engine::Compact {
            let cp = self.compact();
            let pl = cp.pick_less.map_or("off".to_string(), |s| format!("PL{}", s.rho));
            let _ = writeln!(out, "params.pick_less={pl}");
            let _ = writeln!(out, "params.switch_move={}", cp.switch.move_switch);
            let _ = writeln!(out, "params.switch_aggregate={}", cp.switch.aggregate_switch);
            let _ = writeln!(out, "params.probing={}", cp.probing);
            let _ = writeln!(out, "params.value_bits={}", self.value_bits);
        }
    }
}

/// Undirected edge count as reported: stored arcs over two.
pub fn edge_count(g: &CsrGraph) -> f64 {
    g.num_arcs() as f64 / 2.0
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Flat `key=value` run report. Modularity is recomputed from the
/// membership rather than taken from the engine.
pub fn report(
    path: &Path,
    g: &CsrGraph,
    args: &EngineArgs,
    threads: usize,
    r: &LouvainResult,
) -> Result<String, LouvainError> {
    let mut out = String::new();
    let edges = edge_count(g);
    let vertices = g.num_vertices();
    let q = modularity(g, &r.membership)?;
    let wall = r.wall_time().as_secs_f64();
    let split = r.phase_times.split();
    let total: Duration = r.pass_times.iter().sum();
    let pass_split = r.pass_times.iter().map(|t| {
        if total.is_zero() { 0.0 } else { t.as_secs_f64() / total.as_secs_f64() }
    });
    let _ = writeln!(out, "input.path={}", path.display());
    let _ = writeln!(out, "input.vertices={vertices}");
    let _ = writeln!(out, "input.edges={edges}");
    let _ = writeln!(out, "input.avg_degree={}", if vertices == 0 { 0.0 } else { g.num_arcs() as f64 / vertices as f64 });
    args.echo(&mut out, threads);
    let _ = writeln!(out, "modularity={q}");
    let _ = writeln!(out, "communities={}", r.num_communities());
    let _ = writeln!(out, "passes={}", r.passes);
    let _ = writeln!(out, "iterations_per_pass={}", join(&r.iterations_per_pass));
    let _ = writeln!(out, "phase_split.local_moving={}", split.local_moving);
    let _ = writeln!(out, "phase_split.aggregation={}", split.aggregation);
    let _ = writeln!(out, "phase_split.other={}", split.other);
    let _ = writeln!(out, "pass_split={}", join(pass_split.map(|x| format!("{x:.4}"))));
    let _ = writeln!(out, "wall_time={wall}");
    let _ = writeln!(out, "edges_per_second={}", if wall > 0.0 { edges / wall } else { 0.0 });
    Ok(out)
}

/// `vertex<TAB>community` lines in ascending vertex order.
pub fn membership_tsv(r: &LouvainResult) -> String {
    let mut out = String::with_capacity(r.membership.len() * 8);
    for (i, c) in r.membership.iter().enumerate() {
        let _ = writeln!(out, "{i}\t{c}");
    }
    out
}

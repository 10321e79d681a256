//! Slow reference implementations for testing the engines.
//!
//! Nothing here shares scanning, hashtable or aggregation code with the
//! engines: adjacency is kept in ordered maps and modularity is recomputed
//! from a dense pair sum.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::error::LouvainError;
use crate::graph::CsrGraph;
use crate::params::{LouvainParams, LouvainResult, PassStats, PhaseTimes};
use crate::quality::{delta_modularity, Membership};

/// Largest graph [`exhaustive_best_partition`] accepts.
pub const EXHAUSTIVE_MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Exhaustive,
    SequentialLouvain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub best_q: f64,
    pub best_partition: Membership,
    pub method: OracleMethod,
}

type Adjacency = Vec<BTreeMap<u32, f64>>;

fn adjacency(g: &CsrGraph) -> Adjacency {
    (0..g.num_vertices())
        .map(|i| {
            let mut row = BTreeMap::new();
            for (j, w) in g.neighbors(i) {
                *row.entry(j).or_insert(0.0) += w as f64;
            }
            row
        })
        .collect()
}

fn adjacency_modularity(adj: &Adjacency, c: &[u32]) -> f64 {
    let two_m: f64 = adj.iter().flat_map(|r| r.values()).sum();
    let mut internal = 0.0;
    let mut totals: BTreeMap<u32, f64> = BTreeMap::new();
    for (i, row) in adj.iter().enumerate() {
        for (&j, &w) in row {
            if c[i] == c[j as usize] {
                internal += w;
            }
            *totals.entry(c[i]).or_insert(0.0) += w;
        }
    }
    internal / two_m - totals.values().map(|s| (s / two_m).powi(2)).sum::<f64>()
}

/// Modularity by direct summation over vertex pairs.
pub fn reference_modularity(g: &CsrGraph, c: &[u32]) -> Result<f64, LouvainError> {
    if c.len() != g.num_vertices() {
        return Err(LouvainError::MembershipLength {
            expected: g.num_vertices(),
            got: c.len(),
        });
    }
    if g.total_weight() <= 0.0 {
        return Err(LouvainError::DegenerateGraph);
    }
    Ok(adjacency_modularity(&adjacency(g), c))
}

/// Single-threaded Louvain visiting vertices in ascending order, without
/// pruning. Deterministic.
pub fn sequential_louvain(g: &CsrGraph, p: &LouvainParams) -> Result<LouvainResult, LouvainError> {
    p.validate()?;
    if g.total_weight() <= 0.0 {
        return Err(LouvainError::DegenerateGraph);
    }
    let start = Instant::now();
    let mut times = PhaseTimes::default();
    let input = adjacency(g);
    let mut adj = input.clone();
    let mut top: Vec<u32> = (0..g.num_vertices() as u32).collect();
    let mut tolerance = p.initial_tolerance;
    let mut stats = Vec::new();

    for _ in 0..p.max_passes {
        let pass_start = Instant::now();
        let n = adj.len();
        let two_m: f64 = adj.iter().flat_map(|r| r.values()).sum();
        let m = two_m / 2.0;
        let k: Vec<f64> = adj.iter().map(|r| r.values().sum()).collect();
        let mut sigma = k.clone();
        let mut c: Vec<u32> = (0..n as u32).collect();
        let mut gains = Vec::new();
        let mut moves = 0;
        let mut min_gain = f64::INFINITY;

        let move_start = Instant::now();
        for _ in 0..p.max_iterations {
            let mut total = 0.0;
            for i in 0..n {
                let mut links: BTreeMap<u32, f64> = BTreeMap::new();
                for (&j, &w) in &adj[i] {
                    if j as usize != i && w > 0.0 {
                        *links.entry(c[j as usize]).or_insert(0.0) += w;
                    }
                }
                let d = c[i];
                let to_d = links.get(&d).copied().unwrap_or(0.0);
                let mut best = (d, 0.0);
                for (&cand, &to_c) in &links {
                    if cand == d {
                        continue;
                    }
                    let gain = (to_c - to_d) / m - k[i] / (2.0 * m * m) * (k[i] + sigma[cand as usize] - sigma[d as usize]);
                    // Ascending keys: strict improvement keeps the lowest id on ties.
                    if gain > best.1 {
                        best = (cand, gain);
                    }
                }
                if best.0 != d {
                    sigma[d as usize] -= k[i];
                    sigma[best.0 as usize] += k[i];
                    c[i] = best.0;
                    total += best.1;
                    moves += 1;
                    min_gain = min_gain.min(best.1);
                }
            }
            gains.push(total);
            if total <= tolerance {
                break;
            }
        }
        times.local_moving += move_start.elapsed();

        let iterations = gains.len();
        let mut ids: BTreeMap<u32, u32> = BTreeMap::new();
        for &x in &c {
            ids.insert(x, 0);
        }
        for (rank, v) in ids.values_mut().enumerate() {
            *v = rank as u32;
        }
        let communities = ids.len();
        let dense: Vec<u32> = c.iter().map(|x| ids[x]).collect();
        for t in top.iter_mut() {
            *t = dense[*t as usize];
        }
        let converged = iterations <= 1;
        let low_shrink = communities as f64 / n as f64 > p.aggregation_tolerance;
        let aggregated = !(converged || low_shrink);
        if aggregated {
            let agg_start = Instant::now();
            let mut next: Adjacency = vec![BTreeMap::new(); communities];
            for (i, row) in adj.iter().enumerate() {
                for (&j, &w) in row {
                    *next[dense[i] as usize].entry(dense[j as usize]).or_insert(0.0) += w;
                }
            }
            adj = next;
            times.aggregation += agg_start.elapsed();
        }
        stats.push(PassStats {
            tolerance,
            iterations,
            vertices: n,
            communities,
            iteration_gains: gains,
            moves,
            min_accepted_gain: min_gain.is_finite().then_some(min_gain),
            aggregated,
            modularity: p.track_modularity.then(|| adjacency_modularity(&input, &top)),
            time: pass_start.elapsed(),
        });
        if !aggregated {
            break;
        }
        tolerance /= p.tolerance_drop;
    }

    let total = start.elapsed();
    times.other = total.saturating_sub(times.local_moving + times.aggregation);
    let modularity = adjacency_modularity(&input, &top);
    Ok(LouvainResult {
        membership: Membership::from(top),
        passes: stats.len(),
        iterations_per_pass: stats.iter().map(|s| s.iterations).collect(),
        modularity,
        phase_times: times,
        pass_times: stats.iter().map(|s| s.time).collect::<Vec<Duration>>(),
        pass_stats: stats,
    })
}

/// The modularity-maximizing partition of a graph with at most
/// [`EXHAUSTIVE_MAX_VERTICES`] vertices. Among optimal partitions (within
/// `1e-12`) the lexicographically smallest canonical labeling wins.
pub fn exhaustive_best_partition(g: &CsrGraph) -> Result<OracleReport, LouvainError> {
    let n = g.num_vertices();
    if n > EXHAUSTIVE_MAX_VERTICES {
        return Err(LouvainError::TooLarge {
            max: EXHAUSTIVE_MAX_VERTICES,
            got: n,
        });
    }
    if g.total_weight() <= 0.0 {
        return Err(LouvainError::DegenerateGraph);
    }
    let mut a = vec![vec![0.0f64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, w) in g.neighbors(i) {
            row[j as usize] += w as f64;
        }
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let q = |c: &[u32]| {
        let mut internal = 0.0;
        let mut totals = vec![0.0; n];
        for i in 0..n {
            totals[c[i] as usize] += k[i];
            for j in 0..n {
                if c[i] == c[j] {
                    internal += a[i][j];
                }
            }
        }
        internal / two_m - totals.iter().map(|s| (s / two_m).powi(2)).sum::<f64>()
    };

    let mut best: Option<(f64, Vec<u32>)> = None;
    for_each_partition(n, |c| {
        let value = q(c);
        if best.as_ref().is_none_or(|b| value > b.0 + 1e-12) {
            best = Some((value, c.to_vec()));
        }
    });
    let best = best.expect("at least one partition");
    Ok(OracleReport {
        best_q: best.0,
        best_partition: Membership::from(best.1),
        method: OracleMethod::Exhaustive,
    })
}

/// Calls `f` with every restricted-growth string of length `n`, i.e. every
/// set partition in canonical labeling, in lexicographic order.
fn for_each_partition(n: usize, mut f: impl FnMut(&[u32])) {
    let mut c = vec![0u32; n];
    loop {
        f(&c);
        // Rightmost position that can still grow.
        let mut prefix_max = vec![0u32; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(c[i - 1]);
        }
        let Some(i) = (1..n).rev().find(|&i| c[i] <= prefix_max[i]) else { return };
        c[i] += 1;
        for x in &mut c[i + 1..] {
            *x = 0;
        }
    }
}

/// The modularity change of moving `i` to community `target`, both from the
/// delta formula and by recomputing modularity before and after.
pub fn check_delta(g: &CsrGraph, c: &[u32], i: usize, target: u32) -> Result<(f64, f64), LouvainError> {
    let before = reference_modularity(g, c)?;
    let d = c[i];
    if d == target {
        return Ok((0.0, 0.0));
    }
    let adj = adjacency(g);
    let k_i: f64 = adj[i].values().sum();
    let mut to_c = 0.0;
    let mut to_d = 0.0;
    for (&j, &w) in &adj[i] {
        if j as usize == i {
            continue;
        }
        if c[j as usize] == target {
            to_c += w;
        } else if c[j as usize] == d {
            to_d += w;
        }
    }
    let total = |x: u32| -> f64 {
        (0..adj.len())
            .filter(|&v| c[v] == x)
            .map(|v| adj[v].values().sum::<f64>())
            .sum()
    };
    let formula = delta_modularity(to_c, to_d, k_i, total(target), total(d), g.total_weight());
    let mut moved = c.to_vec();
    moved[i] = target;
    let after = adjacency_modularity(&adj, &moved);
    Ok((formula, after - before))
}

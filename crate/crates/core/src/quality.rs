//! Modularity and delta-modularity.
//!
//! With `m` the total edge weight, `Σ_c` the total weight of arcs leaving
//! members of `c` and `σ_c` the weight of arcs with both ends in `c`:
//!
//! ```text
//! Q = Σ_c [ σ_c / 2m - (Σ_c / 2m)^2 ]
//! ```
//!
//! Both sums run over stored arcs, so an internal edge counts once per
//! direction and a self-loop arc counts once. A single community then has
//! `σ = Σ = 2m` and `Q = 0`.

use std::ops::Deref;

use rayon::prelude::*;

use crate::error::LouvainError;
use crate::graph::CsrGraph;

/// Community of every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Membership(Vec<u32>);

impl Membership {
    /// Every vertex in its own community.
    pub fn singletons(n: usize) -> Self {
        Self((0..n as u32).collect())
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn num_communities(&self) -> usize {
        count_communities(&self.0)
    }

    /// True when ids form the contiguous range `[0, |Γ|)`.
    pub fn is_contiguous(&self) -> bool {
        let k = self.num_communities();
        self.0.iter().all(|&c| (c as usize) < k)
    }
}

impl From<Vec<u32>> for Membership {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl Deref for Membership {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

/// Per-community totals, indexed by community id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommunityAggregates {
    /// `Σ_c`
    pub sigma_total: Vec<f64>,
    /// `σ_c`
    pub sigma_internal: Vec<f64>,
}

fn check_len(g: &CsrGraph, c: &[u32]) -> Result<(), LouvainError> {
    if c.len() != g.num_vertices() {
        return Err(LouvainError::MembershipLength {
            expected: g.num_vertices(),
            got: c.len(),
        });
    }
    Ok(())
}

pub fn community_aggregates(g: &CsrGraph, c: &[u32]) -> Result<CommunityAggregates, LouvainError> {
    check_len(g, c)?;
    let slots = c.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
    let mut agg = CommunityAggregates {
        sigma_total: vec![0.0; slots],
        sigma_internal: vec![0.0; slots],
    };
    for i in 0..g.num_vertices() {
        let ci = c[i] as usize;
        for (j, w) in g.neighbors(i) {
            let w = w as f64;
            agg.sigma_total[ci] += w;
            if c[j as usize] as usize == ci {
                agg.sigma_internal[ci] += w;
            }
        }
    }
    Ok(agg)
}

/// Modularity of a membership. Errors on a zero-weight graph.
pub fn modularity(g: &CsrGraph, c: &[u32]) -> Result<f64, LouvainError> {
    check_len(g, c)?;
    let m = g.total_weight();
    if m <= 0.0 {
        return Err(LouvainError::DegenerateGraph);
    }
    let k = crate::graph::vertex_weights(g);
    let slots = c.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
    let mut total = vec![0.0f64; slots];
    for (i, &ci) in c.iter().enumerate() {
        total[ci as usize] += k[i];
    }
    // Fixed-size chunks keep the summation order independent of the pool.
    let internal: f64 = (0..g.num_vertices())
        .collect::<Vec<_>>()
        .par_chunks(4096)
        .map(|vs| {
            vs.iter()
                .map(|&i| {
                    g.neighbors(i)
                        .filter(|&(j, _)| c[j as usize] == c[i])
                        .map(|(_, w)| w as f64)
                        .sum::<f64>()
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let two_m = 2.0 * m;
    let expected: f64 = total.iter().map(|&s| (s / two_m) * (s / two_m)).sum();
    Ok(internal / two_m - expected)
}

/// Modularity change from moving vertex `i` out of `d` into `c`:
///
/// ```text
/// ΔQ = (K_i→c - K_i→d) / m - K_i / (2m^2) * (K_i + Σ_c - Σ_d)
/// ```
///
/// `k_i_to_c` and `k_i_to_d` exclude self-loops of `i`. `sigma_d` includes
/// `K_i` (the vertex is still in `d`); `sigma_c` does not.
#[inline]
pub fn delta_modularity(
    k_i_to_c: f64,
    k_i_to_d: f64,
    k_i: f64,
    sigma_c: f64,
    sigma_d: f64,
    m: f64,
) -> f64 {
    (k_i_to_c - k_i_to_d) / m - k_i / (2.0 * m * m) * (k_i + sigma_c - sigma_d)
}

/// Number of distinct community ids.
pub fn count_communities(c: &[u32]) -> usize {
    let Some(&max) = c.iter().max() else { return 0 };
    let mut seen = vec![false; max as usize + 1];
    c.iter()
        .filter(|&&x| !std::mem::replace(&mut seen[x as usize], true))
        .count()
}

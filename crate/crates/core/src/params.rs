use std::time::Duration;

use crate::error::LouvainError;
use crate::quality::Membership;

/// Tuning knobs shared by every engine.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainParams {
    pub max_passes: usize,
    /// Local-moving iterations per pass.
    pub max_iterations: usize,
    /// Convergence tolerance of the first pass.
    pub initial_tolerance: f64,
    /// The tolerance is divided by this after every aggregating pass.
    pub tolerance_drop: f64,
    /// Stop when a pass keeps more than this fraction of its communities.
    pub aggregation_tolerance: f64,
    pub thread_count: usize,
    /// Vertices handed to a worker per scheduling step.
    pub chunk_size: usize,
    /// Only revisit vertices whose neighborhood changed.
    pub pruning: bool,
    /// Record the top-level modularity after every pass (costs one `O(|E|)`
    /// evaluation per pass).
    pub track_modularity: bool,
}

impl Default for LouvainParams {
    fn default() -> Self {
        Self {
            max_passes: 10,
            max_iterations: 20,
            initial_tolerance: 0.01,
            tolerance_drop: 10.0,
            aggregation_tolerance: 0.8,
            thread_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
            chunk_size: 2048,
            pruning: true,
            track_modularity: false,
        }
    }
}

impl LouvainParams {
    pub fn single_threaded() -> Self {
        Self {
            thread_count: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), LouvainError> {
        let bad = |msg: &str| Err(LouvainError::InvalidParams(msg.into()));
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1");
        }
        if self.tolerance_drop.is_nan() || self.tolerance_drop < 1.0 {
            return bad("tolerance_drop must be at least 1");
        }
        if !(self.aggregation_tolerance > 0.0 && self.aggregation_tolerance <= 1.0) {
            return bad("aggregation_tolerance must lie in (0, 1]");
        }
        if self.initial_tolerance.is_nan() || self.initial_tolerance < 0.0 {
            return bad("initial_tolerance must be non-negative");
        }
        if self.thread_count < 1 {
            return bad("thread_count must be at least 1");
        }
        if self.chunk_size < 1 {
            return bad("chunk_size must be at least 1");
        }
        Ok(())
    }
}

/// Wall time spent in each phase of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimes {
    pub local_moving: Duration,
    pub aggregation: Duration,
    /// Initialization, renumbering, dendrogram lookups, resets.
    pub other: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.local_moving + self.aggregation + self.other
    }

    pub fn split(&self) -> PhaseSplit {
        let total = self.total().as_secs_f64();
        if total == 0.0 {
            return PhaseSplit {
                local_moving: 0.0,
                aggregation: 0.0,
                other: 1.0,
            };
        }
        let local_moving = self.local_moving.as_secs_f64() / total;
        let aggregation = self.aggregation.as_secs_f64() / total;
        PhaseSplit {
            local_moving,
            aggregation,
            other: 1.0 - local_moving - aggregation,
        }
    }
}

/// Fractions of total run time per phase; they sum to one.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseSplit {
    pub local_moving: f64,
    pub aggregation: f64,
    pub other: f64,
}

impl PhaseSplit {
    pub fn sum(&self) -> f64 {
        self.local_moving + self.aggregation + self.other
    }
}

/// Result of one local-moving phase.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MoveOutcome {
    /// Iterations performed, counting the converging one.
    pub iterations: usize,
    /// Summed gain of accepted moves, per iteration.
    pub iteration_gains: Vec<f64>,
    pub moves: usize,
    pub min_accepted_gain: Option<f64>,
}

/// What happened in one pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PassStats {
    /// Tolerance the local-moving phase converged against.
    pub tolerance: f64,
    pub iterations: usize,
    /// Vertices of the pass graph, i.e. communities before local moving.
    pub vertices: usize,
    /// Communities after local moving.
    pub communities: usize,
    /// Summed gain of accepted moves, per iteration.
    pub iteration_gains: Vec<f64>,
    pub moves: usize,
    /// Smallest gain among accepted moves.
    pub min_accepted_gain: Option<f64>,
    pub aggregated: bool,
    /// Top-level modularity after the pass, with
    /// [`LouvainParams::track_modularity`].
    pub modularity: Option<f64>,
    pub time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    /// Contiguously renumbered communities of the input vertices.
    pub membership: Membership,
    pub passes: usize,
    pub iterations_per_pass: Vec<usize>,
    pub modularity: f64,
    pub phase_times: PhaseTimes,
    pub pass_times: Vec<Duration>,
    pub pass_stats: Vec<PassStats>,
}

impl LouvainResult {
    pub fn num_communities(&self) -> usize {
        self.membership.num_communities()
    }

    pub fn wall_time(&self) -> Duration {
        self.phase_times.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_validation() {
        let p = LouvainParams::default();
        assert_eq!(
            (p.max_passes, p.max_iterations, p.chunk_size),
            (10, 20, 2048)
        );
        assert_eq!(
            (p.initial_tolerance, p.tolerance_drop, p.aggregation_tolerance),
            (0.01, 10.0, 0.8)
        );
        p.validate().unwrap();
        for bad in [
            LouvainParams { max_iterations: 0, ..p.clone() },
            LouvainParams { tolerance_drop: 0.5, ..p.clone() },
            LouvainParams { aggregation_tolerance: 0.0, ..p.clone() },
            LouvainParams { aggregation_tolerance: 1.5, ..p.clone() },
            LouvainParams { thread_count: 0, ..p.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn split_sums_to_one() {
        let t = PhaseTimes {
            local_moving: Duration::from_millis(49),
            aggregation: Duration::from_millis(35),
            other: Duration::from_millis(16),
        };
        let s = t.split();
        assert!((s.sum() - 1.0).abs() < 1e-12);
        assert!((s.local_moving - 0.49).abs() < 1e-12);
        assert_eq!(PhaseTimes::default().split().sum(), 1.0);
    }
}

//! Shared-memory parallel Louvain community detection.
//!
//! Two engines optimize modularity over the same graph model:
//!
//! * [`mc`] keeps one collision-free key-list/value-array hashtable per worker
//!   thread and aggregates through prefix-sum built CSR buffers.
//! * [`compact`] gives every vertex (and every community during aggregation) an
//!   open-addressing table carved out of one `O(|E|)` slab, probed with a hybrid
//!   quadratic/double-hashing sequence, with periodic pick-less rounds to break
//!   community swap cycles.
//!
//! [`oracle`] holds slow, independent reference implementations used to check
//! both engines, and [`quality`] holds the modularity math they share.

pub mod atomic;
pub mod compact;
mod driver;
pub mod error;
pub mod graph;
pub mod mc;
pub mod oracle;
pub mod params;
pub mod quality;
pub mod scan;
mod schedule;

pub use compact::{compact_louvain, CompactParams};
pub use error::{GraphError, LouvainError};
pub use graph::{build_csr, vertex_weights, CsrGraph, EdgeList};
pub use mc::louvain;
pub use params::{LouvainParams, LouvainResult, MoveOutcome, PassStats, PhaseSplit, PhaseTimes};
pub use quality::{modularity, Membership};

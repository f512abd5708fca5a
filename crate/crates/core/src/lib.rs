//! Local certification of graph properties on bounded-pathwidth graphs.
//!
//! A centralized prover turns an interval representation into a lane
//! partition with a low-congestion embedding, builds a bounded-depth
//! hierarchical decomposition, and emits per-edge certificates. A local
//! verifier checks them at each vertex from its incident labels alone.

pub mod bits;
pub mod graph;
pub mod interval;
pub mod lane_partition;
pub mod homomorphism;
pub mod lane_recursive;
pub mod certification;

//! Multilevel hypergraph partitioning with embedding-guided coarsening.
//!
//! A V-cycle contracts matched node pairs level by level, solves the
//! coarsest hypergraph, then projects the assignment back and improves it
//! with FM refinement at every level. Matching uses either the heavy-edge
//! score or the heavy-edge score reweighted by node embeddings learned on the
//! star expansion.

pub mod bench;
pub mod coarsening;
pub mod embedding;
pub mod error;
pub mod hypergraph;
pub mod initial;
pub mod partition;
pub mod partitioner;
pub mod refinement;
pub mod seed;

pub use error::{Error, Result};
pub use hypergraph::{BipartiteGraph, ContractionMap, Hypergraph, NodeId, Weight};
pub use partition::{Objective, PartitionAssignment};
pub use partitioner::{partition, recursive_bisect, PartitionMode, PartitionReport, VCycleConfig};

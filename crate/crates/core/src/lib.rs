//! Graph automorphism groups and canonical labelling by
//! individualization-refinement.
//!
//! Two search engines are provided: a depth-first one that keeps a first and
//! a best leaf, and a breadth-first one that keeps only the nodes of greatest
//! invariant on each level and descends from them along random experimental
//! paths. Both share the refinement, target-cell selection, invariant and
//! permutation-group layers.

pub mod bench;
pub mod engine;
pub mod generators;
pub mod error;
pub mod graph;
pub mod group;
pub mod invariant;
pub mod io;
pub mod refine;
pub mod target;

pub use engine::{
    isomorphic, isomorphic_coloured, run, run_bfs, run_dfs, CanonicalForm, EngineConfig, EngineResult, Mode,
    SearchNode, SearchStats, Strategy,
};
pub use error::{Error, Result};
pub use graph::{ColouredGraph, Colouring, Graph, Permutation};
pub use group::{OrbitPartition, PermGroup};
pub use invariant::{InvariantHook, LeafCertificate, TraceValue};
pub use target::SelectorStrategy;

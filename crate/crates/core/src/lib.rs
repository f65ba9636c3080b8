//! Design, verification and exact optimisation of constant GC-content DNA
//! codes under Hamming-distance and reverse-complement constraints.
//!
//! - [`seq`]: packed sequences, distances, enumeration and sampling.
//! - [`code`]: code sets, verification, the code file format.
//! - [`sls`]: the insert-and-evict stochastic local search.
//! - [`graph`]: compatibility graphs and DIMACS.
//! - [`clique`]: exact maximum-clique search and counting.
//! - [`symmetry`]: automorphisms of the compatibility graphs.
//! - [`table`]: recorded reference values and the bounds-table harness.

pub mod clique;
pub mod code;
pub mod error;
pub mod graph;
pub mod seq;
pub mod sls;
pub mod symmetry;
pub mod table;

pub use code::{CodeParams, CodeSet, VerifyReport};
pub use error::{Error, Result};
pub use graph::{ConflictGraph, Graph, GraphKind, GraphStats};
pub use seq::Sequence;

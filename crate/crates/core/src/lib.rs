//! Exact h-hopsets for weighted undirected graphs.
//!
//! A hopset is a set of weighted shortcut edges whose addition lets every
//! node pair be joined by a shortest path of at most h edges, at exactly
//! the original distance. This crate builds them four ways (trees,
//! bounded treewidth, bounded skeleton dimension, LP rounding), assembles
//! 3-hopsets into a probe-based distance oracle, and validates everything
//! against brute-force shortest paths.

pub mod ackermann;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hopset;
pub mod io;
pub mod lp;
pub mod oracle;
pub mod ratio;
pub mod skeleton;
pub mod tree;
pub mod treewidth;
pub mod usp;

pub use error::{GraphError, HopsetError, LpError, OracleError, ParseError, TdError};
pub use graph::{dijkstra, limited_hop_distances, Edge, SpTree, WeightedGraph, INF};
pub use hopset::{generic_query, validate_hopset, Hopset, Part, Shortcut, ValidationReport};
pub use oracle::{validate_oracle, QueryResult, ThreeHopOracle, ValidationScope};
pub use ratio::Ratio;
pub use usp::{make_usp, shortest_path, verify_usp, UspCertificate};

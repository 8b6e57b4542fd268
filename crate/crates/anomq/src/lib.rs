//! anomq finds the most anomalous subgraph of an attributed network under a
//! shape constraint: the result must be approximately isomorphic to a small
//! user-supplied query graph (a ring, line, star, bipartite clique, tree, or
//! any explicit edge list).
//!
//! The search alternates two bounds. An unconstrained *upper bound* takes
//! the highest-priority (lowest p-value) vertices of query size; a feasible
//! *lower bound* decomposes the query into stars, matches each star around
//! the upper bound's roots, and greedily assembles the matches into one
//! subgraph by minimizing graph edit distance to the query. The loop stops
//! once the two bounds score within an epsilon of each other.
//!
//! Anomalousness is measured by scan statistics over empirical p-values
//! (Berk-Jones, Higher Criticism) or over observed-versus-baseline counts
//! (expectation-based Poisson, Kulldorff); all four satisfy the linear-time
//! subset scanning property that makes the unconstrained maximization a
//! prefix scan.
//!
//! Start with the runnable demos in `examples/` (`cargo run --example
//! find_planted_ring`) or the `anomq` binary for file-based workflows.

pub mod engine;
pub mod error;
pub mod eval;
pub mod ged;
pub mod graph;
pub mod query;
pub mod sim;
pub mod stats;

pub use engine::{anomaly_max_q, EngineParams, QueryResult};
pub use error::{Error, Result};
pub use graph::{AttributedGraph, Subgraph};
pub use query::{QueryGraph, QuerySpec};
pub use sim::{flip_noise, generate, SimConfig, SimTopology};
pub use stats::{calibrate_pvalues, priority_sort, ScoreSpec, Statistic};

pub mod canon;
pub mod census;
pub mod certify;
pub mod digraph;
pub mod error;
pub mod hypergraph;
pub mod orderings;
pub mod palette;
pub mod partitioned;
pub mod quasirandom;
pub mod rational;
pub mod subgraph;

pub use error::{ParseError, Result, TuranError};
pub use hypergraph::{Edge, Hypergraph3};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

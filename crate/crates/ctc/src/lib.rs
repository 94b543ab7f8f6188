//! Closest truss community search: find a connected k-truss containing a
//! set of query nodes with the largest possible k and a small diameter.

pub mod error;
pub mod eval;
pub mod fixtures;
pub mod graph;
pub mod local;
pub mod oracle;
pub mod overlay;
pub mod search;
pub mod truss;

pub use error::{CtcError, Result};
pub use graph::Graph;
pub use local::lctc_search;
pub use search::{basic_search, bulk_delete_search, CommunityResult, QuerySpec};
pub use truss::TrussIndex;

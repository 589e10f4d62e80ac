//! Constant-time motion planning with anytime refinement.
//!
//! Offline, [`preprocess`] decomposes every goal region into neighborhoods
//! grown around attractor states, each paired with a representative path from
//! the home configuration. Online, [`query`] answers a request by lookup plus
//! a bounded greedy descent (no search, no collision checks) and then spends
//! any remaining budget in [`search::anytime_refine`].

pub mod cspace;
pub mod harness;
pub mod instrument;
pub mod preprocess;
pub mod query;
pub mod search;

pub use cspace::{ArmModel, Config, Obstacle, Rect, RegionSpec, Scenario};
pub use preprocess::{
    load_library, preprocess, save_library, CoverEntry, EntryId, Library, LibraryError,
    Neighborhood, PreprocessError, LIBRARY_FORMAT_VERSION,
};
pub use query::{query, PotentialStateIndex, QueryError, QueryRequest, QueryResult};
pub use search::{anytime_refine, astar, Goal, Path, RefineReport, SearchError};

//! Discrete-time steady/casual partnership network.
//!
//! Each iteration (one month) runs, in order: casual clearing, migration,
//! steady dissolution, steady formation, casual formation. Formation always
//! goes through [`match_pairs`], which pairs a uniformly shuffled willing
//! pool and drops one node when the pool is odd.

mod events;
mod export;
mod matching;
mod params;
mod state;

pub use events::{
    CasualFormation, EventLog, IterationRecord, NodeId, Pair, Snapshot, SteadyDissolution,
    SteadyEdge,
};
pub use export::{export_edges, write_edges_csv, EdgeKind, EdgeRow};
pub use matching::match_pairs;
pub use params::{ParamSet, FREE_PARAM_NAMES};
pub use state::{simulate, simulate_seeded, NetworkState, Trajectory};

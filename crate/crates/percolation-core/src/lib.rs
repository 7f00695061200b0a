//! Finite long-range percolation environments: generation, cluster labeling,
//! cutpoint detection, and the deterministic keyed randomness the rest of the
//! workspace builds on.

pub mod cluster;
pub mod cutpoint;
pub mod env;
pub mod error;
pub mod lattice;
pub mod params;
pub mod rng;
pub mod snapshot;

pub use cluster::{analyze_clusters, ClusterLabeling, UnionFind};
pub use cutpoint::{detect_cutpoints, CutpointSet};
pub use env::{
    edge_present, edge_uniform, expected_long_edge_count, generate_environment,
    generate_environment_budgeted, Environment,
};
pub use error::PercError;
pub use params::{connection_probability, Boundary, ModelParams, Norm};

//! The coupling's random objects: geometric processes, excursion statistics
//! on the two-ball graph, long-jump increment variables, the derived
//! processes built from them, and the diffusivity-like constant K.

pub mod derived;
pub mod excursion;
pub mod geom;
pub mod increments;
pub mod kconst;
pub mod vstar;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoupleError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("atom collision, re-grid required: {0}")]
    ReGrid(String),
}

pub use derived::{build_derived_processes, coupled_x_hat, DerivedPaths, PoolConfig};
pub use excursion::excursion_parameter;
pub use geom::GeomStream;
pub use increments::{IncrementPool, JumpLaw, ZEntry};
pub use kconst::{estimate_k, KReport, TypeDistribution};
pub use vstar::{geom_ks, simulate_vstar, Ball, VStarReport};

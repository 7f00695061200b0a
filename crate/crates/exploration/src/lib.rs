//! The environment exploration process: walks that reveal the percolation
//! graph as they move, with the main/special phase coupling bookkeeping,
//! error flags, and rare-event scans.

pub mod events;
pub mod run;
pub mod scales;
pub mod state;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub use events::{event_scan, fstar_pair, touched_long_edges, EventReport};
pub use run::{
    default_q_grid, run_exploration, write_transcript, ExplorationRun, StepRecord, Transcript,
};
pub use scales::{scale_parameters, Scales};
pub use state::{CouplingCase, ExplorationState, LongReveal};

//! Simple random walks on environment views: trajectory recording, ensembles,
//! rescaled cadlag representatives, and L^q distances.

pub mod dump;
pub mod ensemble;
pub mod path;
pub mod stepfn;
pub mod view;

pub use ensemble::run_ensemble;
pub use path::{run_walk, WalkError, WalkPath};
pub use stepfn::{lq_distance, rescale_path, Interp, StepFnError, StepFunction, VectorNorm};
pub use view::{AdjGraph, EnvView};

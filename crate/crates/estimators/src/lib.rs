//! Statistics that turn simulations into checks: tail indices, scaling
//! exponents, local return probabilities, ergodic new-vertex rates,
//! heat-kernel decay, jump diagnostics, the cutpoint gap chain, and marginal
//! comparisons against reference processes.

pub mod chain;
pub mod compare;
pub mod cutchain;
pub mod heat;
pub mod hill;
pub mod jumps;
pub mod rates;
pub mod report;
pub mod scaling;
pub mod stats;

pub use chain::{ball_graph, harmonic_hitting, return_probabilities, LocalReturn, ReturnMode};
pub use compare::{marginal_compare, MarginalReport};
pub use cutchain::{
    cutpoint_chain, diffusivity_regression, median_diffusivity, CutpointChain, GapSolve,
};
pub use heat::{heat_kernel_exponent, HeatMode, HeatReport};
pub use hill::{hill_tail_index, EstimError, TailEstimate};
pub use jumps::{small_jump_mass, small_jump_trend, zmax_tail_check, ZmaxReport};
pub use rates::{env_type_fn, new_vertex_rates, RateReport};
pub use scaling::{scaling_exponent, ScalingReport, ScalingStatistic};

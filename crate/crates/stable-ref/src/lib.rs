//! Reference alpha-stable processes: exact continuous samplers and the
//! discrete domain-of-attraction normalization, for comparison against
//! simulated walks.

pub mod cms;
pub mod discrete;

pub use cms::{
    sample_isotropic_increment, sample_positive_stable, sample_stable_1d, sample_stable_path,
    symmetric_stable, StableError, StablePath,
};
pub use discrete::{calibrate_scale, calibration_report, discrete_reference_path, JumpLaw};

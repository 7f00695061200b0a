//! Model parameters of the long-range percolation edge law.

use serde::{Deserialize, Serialize};

use crate::error::PercError;

/// Norm used when measuring the distance entering the edge law.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    /// Euclidean norm (the default for the edge law).
    L2,
    /// Sup norm (the convention for local balls).
    Linf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    /// Periodic box `(Z/L)^d`; edges sampled by torus distance.
    Torus,
    /// Plain box `{0,...,L-1}^d`, needed for cutpoint analysis.
    Free,
}

/// Parameters of the edge law `p(r) = 1 - exp(-beta r^{-s})` for `r >= 2`,
/// optionally forcing every nearest-neighbor edge (`P(1) = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: usize,
    /// Tail exponent; must exceed `d`.
    pub s: f64,
    /// Rate constant of the edge law.
    pub beta: f64,
    /// Force every nearest-neighbor edge to be present.
    pub nn_prob_one: bool,
    /// Side length of the box.
    pub l: i64,
    pub boundary: Boundary,
    /// Norm for the edge-law distance.
    pub norm: Norm,
}

impl ModelParams {
    /// Torus defaults: L2 edge-law norm, nearest neighbors forced.
    pub fn new(d: usize, s: f64, beta: f64, l: i64) -> Self {
        ModelParams {
            d,
            s,
            beta,
            nn_prob_one: true,
            l,
            boundary: Boundary::Torus,
            norm: Norm::L2,
        }
    }

    pub fn validate(&self) -> Result<(), PercError> {
        if self.d == 0 || self.d > 3 {
            return Err(PercError::Domain(format!(
                "dimension d={} unsupported (1..=3)",
                self.d
            )));
        }
        if !(self.s > self.d as f64) {
            return Err(PercError::Domain(format!(
                "tail exponent s={} must exceed d={}",
                self.s, self.d
            )));
        }
        if !(self.beta >= 0.0) {
            return Err(PercError::Domain(format!("beta={} must be >= 0", self.beta)));
        }
        if self.l < 4 {
            return Err(PercError::Domain(format!("L={} must be >= 4", self.l)));
        }
        Ok(())
    }

    /// Number of vertices `L^d`.
    pub fn volume(&self) -> u64 {
        (self.l as u64).pow(self.d as u32)
    }

    /// Stability index `alpha = s - d` of the heavy-tail regime.
    pub fn alpha(&self) -> f64 {
        self.s - self.d as f64
    }
}

/// Edge probability at distance `r >= 1`.
///
/// Returns 1 for `r = 1` when nearest neighbors are forced, and
/// `1 - exp(-beta r^{-s})` otherwise; monotone nonincreasing in `r`.
pub fn connection_probability(r: f64, params: &ModelParams) -> Result<f64, PercError> {
    if !(r >= 1.0) {
        return Err(PercError::Domain(format!("distance r={r} must be >= 1")));
    }
    if params.nn_prob_one && r == 1.0 {
        return Ok(1.0);
    }
    Ok(-(-params.beta * r.powf(-params.s)).exp_m1())
}

//! d=1 cutpoint detection.
//!
//! A vertex `x` is a cutpoint when no long edge `{a,b}` (with `b - a >= 2`)
//! satisfies `a <= x <= b`. Note the closed inequalities: an edge jumping
//! *from* `x` over `x`'s neighbor already disqualifies `x`, i.e. endpoint
//! membership is excluded. Every crossing of a cutpoint must then use its
//! nearest-neighbor edges, which is what the gap-chain analysis relies on.

use crate::env::Environment;
use crate::error::PercError;
use crate::params::Boundary;

#[derive(Clone, Debug)]
pub struct CutpointSet {
    /// Sorted cutpoint coordinates.
    pub cutpoints: Vec<i64>,
}

impl CutpointSet {
    /// Gaps between consecutive cutpoints.
    pub fn gaps(&self) -> Vec<i64> {
        self.cutpoints.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// One sweep with a running maximal right endpoint: `x` is a cutpoint iff
/// every long edge starting at `a <= x` ends strictly left of `x`.
pub fn detect_cutpoints(env: &Environment) -> Result<CutpointSet, PercError> {
    let p = &env.params;
    if p.d != 1 {
        return Err(PercError::Unsupported(format!(
            "cutpoints are a d=1 notion (got d={})",
            p.d
        )));
    }
    if !p.nn_prob_one {
        return Err(PercError::Unsupported(
            "cutpoints require nn_prob_one (the chain must be connected)".into(),
        ));
    }
    if p.boundary != Boundary::Free {
        return Err(PercError::Unsupported(
            "cutpoints require a free-boundary (unwrapped) environment".into(),
        ));
    }
    let mut cutpoints = Vec::new();
    let mut max_right = i64::MIN;
    for x in 0..p.l {
        for &b in env.long_neighbors(x as u64) {
            let b = b as i64;
            if b > x {
                max_right = max_right.max(b);
            }
        }
        if max_right < x {
            cutpoints.push(x);
        }
    }
    Ok(CutpointSet { cutpoints })
}

/// Brute-force check of the definition; oracle for small environments.
pub fn detect_cutpoints_bruteforce(env: &Environment) -> Result<CutpointSet, PercError> {
    let p = &env.params;
    if p.d != 1 || p.boundary != Boundary::Free {
        return Err(PercError::Unsupported("d=1 free boundary only".into()));
    }
    let edges: Vec<(i64, i64)> = env
        .long_edges()
        .map(|(u, v)| (u as i64, v as i64))
        .collect();
    let cutpoints = (0..p.l)
        .filter(|&x| !edges.iter().any(|&(a, b)| a <= x && x <= b))
        .collect();
    Ok(CutpointSet { cutpoints })
}

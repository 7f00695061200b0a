//! The cutpoint gap chain: exact crossing probabilities between consecutive
//! cutpoints, the induced spacings, and the plug-in diffusion constant.

use crate::chain::harmonic_hitting;
use crate::hill::EstimError;
use crate::stats::{mean, variance};
use percolation_core::cutpoint::detect_cutpoints;
use percolation_core::Environment;
use serde::Serialize;

/// One gap between consecutive cutpoints `left < right`, with the exact
/// crossing probabilities obtained from a single harmonic solve on the gap
/// subgraph (absorbing at both cutpoints).
#[derive(Clone, Debug, Serialize)]
pub struct GapSolve {
    pub left: i64,
    pub right: i64,
    /// Q(j, j+1): from `left`, hit `right` before returning to `left` or
    /// falling back to the previous cutpoint.
    pub q_forward: f64,
    /// Q(j+1, j): the reverse crossing.
    pub q_backward: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutpointChain {
    /// Interior cutpoints used for the chain (lattice-boundary cutpoints are
    /// dropped: their degree-1 endpoints break the reversibility symmetry
    /// that the bi-infinite chain enjoys).
    pub cutpoints: Vec<i64>,
    pub gaps: Vec<GapSolve>,
    /// Harmonic coordinates: p_0 = 0, p_{j+1} - p_j = 1/Q(j, j+1).
    pub p: Vec<f64>,
    pub mean_gap: f64,
    pub mean_p_spacing: f64,
    /// K* = 2 (E[c_1 - c_0])^2 / E[p_1 - p_0].
    pub k_star: f64,
    /// Mean conditional quadratic variation of the gap-chain martingale:
    /// average over interior cutpoints of 1/Q(j, j+1) + 1/Q(j, j-1).
    pub qv_mean: f64,
    /// max_j |Q(j, j+1) - Q(j+1, j)| (should be float-roundoff small).
    pub max_symmetry_err: f64,
    /// max_j (1/Q(j, j+1) - 2 (c_{j+1} - c_j)) (should be <= 0).
    pub max_resistance_excess: f64,
}

/// Exact gap-chain analysis of a d=1 free-boundary environment with P(1)=1.
///
/// Cutpoints carry no long edges, so crossing a cutpoint always uses its two
/// nearest-neighbor edges; every long edge lives strictly inside one gap and
/// each gap can be solved independently. Writing `h` for the harmonic
/// function on the gap with `h(left) = 0`, `h(right) = 1`, the first-step
/// decomposition at the degree-2 cutpoints gives
/// `Q(j, j+1) = h(left + 1) / 2` and `Q(j+1, j) = (1 - h(right - 1)) / 2`.
pub fn cutpoint_chain(env: &Environment) -> Result<CutpointChain, EstimError> {
    let set = detect_cutpoints(env).map_err(|e| EstimError::Domain(e.to_string()))?;
    let l = env.params.l;
    let cutpoints: Vec<i64> = set
        .cutpoints
        .into_iter()
        .filter(|&c| c > 0 && c < l - 1)
        .collect();
    if cutpoints.len() < 3 {
        return Err(EstimError::Degenerate(format!(
            "need >= 3 interior cutpoints, found {}",
            cutpoints.len()
        )));
    }
    let mut gaps = Vec::with_capacity(cutpoints.len() - 1);
    for w in cutpoints.windows(2) {
        gaps.push(solve_gap(env, w[0], w[1])?);
    }
    let mut p = Vec::with_capacity(cutpoints.len());
    p.push(0.0);
    for g in &gaps {
        p.push(p.last().unwrap() + 1.0 / g.q_forward);
    }
    let gap_lens: Vec<f64> = gaps.iter().map(|g| (g.right - g.left) as f64).collect();
    let p_spacings: Vec<f64> = gaps.iter().map(|g| 1.0 / g.q_forward).collect();
    let mean_gap = mean(&gap_lens);
    let mean_p_spacing = mean(&p_spacings);
    let k_star = 2.0 * mean_gap * mean_gap / mean_p_spacing;
    let qv: Vec<f64> = gaps
        .windows(2)
        .map(|w| 1.0 / w[1].q_forward + 1.0 / w[0].q_backward)
        .collect();
    let max_symmetry_err = gaps
        .iter()
        .map(|g| (g.q_forward - g.q_backward).abs())
        .fold(0.0f64, f64::max);
    let max_resistance_excess = gaps
        .iter()
        .map(|g| 1.0 / g.q_forward - 2.0 * (g.right - g.left) as f64)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CutpointChain {
        cutpoints,
        gaps,
        p,
        mean_gap,
        mean_p_spacing,
        k_star,
        qv_mean: mean(&qv),
        max_symmetry_err,
        max_resistance_excess,
    })
}

fn solve_gap(env: &Environment, a: i64, b: i64) -> Result<GapSolve, EstimError> {
    let m = (b - a + 1) as usize;
    if m > 2_000_000 {
        return Err(EstimError::Domain(format!(
            "gap [{a}, {b}] too large to solve"
        )));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (i, row) in adj.iter_mut().enumerate().take(m - 1).skip(1) {
        let x = (a + i as i64) as u64;
        let deg = env.degree(x);
        for idx in 0..deg {
            let u = env.neighbor(x, idx) as i64;
            if !(a..=b).contains(&u) {
                return Err(EstimError::Domain(format!(
                    "edge {{{x}, {u}}} leaves gap [{a}, {b}]: not a cutpoint gap"
                )));
            }
            row.push((u - a) as usize);
        }
    }
    let mut boundary = vec![None; m];
    boundary[0] = Some(0.0);
    boundary[m - 1] = Some(1.0);
    let h = harmonic_hitting(&adj, &boundary);
    Ok(GapSolve {
        left: a,
        right: b,
        q_forward: 0.5 * h[1],
        q_backward: 0.5 * (1.0 - h[m - 2]),
    })
}

/// Robust diffusivity from endpoint displacements: the median of |X_n - X_0|
/// calibrated against the Gaussian quartile, `K = (med / 0.6745)^2 / n`.
///
/// For s < d + 2 the single-jump second moment diverges, so the sample
/// variance of X_n is dominated by rare huge jumps and never stabilizes at
/// reachable horizons even though the walk satisfies a CLT; the median of
/// the limiting normal is unaffected and converges quickly.
pub fn median_diffusivity(abs_displacements: &[f64], n: u64) -> Result<f64, EstimError> {
    if abs_displacements.len() < 10 {
        return Err(EstimError::Domain("need >= 10 endpoint samples".into()));
    }
    let med = crate::stats::median(abs_displacements);
    Ok((med / 0.6745).powi(2) / n as f64)
}

/// Independent diffusivity estimate: least-squares slope through the origin
/// of `Var(X_n)` against `n`, from endpoint samples at several horizons.
pub fn diffusivity_regression(endpoints_by_n: &[(u64, Vec<f64>)]) -> Result<f64, EstimError> {
    if endpoints_by_n.len() < 2 {
        return Err(EstimError::Domain("need >= 2 horizons".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (n, xs) in endpoints_by_n {
        if xs.len() < 2 {
            return Err(EstimError::Domain("need >= 2 endpoints per horizon".into()));
        }
        let v = variance(xs);
        num += *n as f64 * v;
        den += (*n as f64) * (*n as f64);
    }
    Ok(num / den)
}

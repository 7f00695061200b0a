//! On-diagonal heat-kernel decay exponents.

use crate::chain::ball_graph;
use crate::hill::EstimError;
use crate::stats::ls_slope;
use percolation_core::rng::KeyedStream;
use percolation_core::Environment;
use serde::Serialize;

#[derive(Clone, Copy, Debug)]
pub enum HeatMode {
    /// Power iteration of the one-step kernel on the radius-`radius` ball
    /// with the complement reflected (transitions renormalized to in-ball
    /// neighbors). Boundary contamination is monitored, not prevented.
    Exact { radius: i64 },
    /// Return counting over `trials` independent walks.
    MonteCarlo { trials: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatReport {
    pub slope: f64,
    pub ci_half_width: f64,
    pub t_grid: Vec<u64>,
    /// Parity-damped estimates `P_t(0,0) + P_{t+1}(0,0)`.
    pub p_hat: Vec<f64>,
    /// Exact mode: largest mass seen on vertices with out-of-ball neighbors.
    pub boundary_mass: Option<f64>,
    /// Set when the boundary mass exceeds 10^-3 (truncation radius too small
    /// for the requested horizon; slope still reported).
    pub boundary_flag: bool,
}

/// Fits the on-diagonal return-probability decay `P_t(0,0) ~ t^{-slope}`.
///
/// Bipartite (nn-only) environments have zero odd-time returns; the
/// parity-damped statistic `P_t + P_{t+1}` keeps the regression well-defined
/// in every regime without a mode switch.
pub fn heat_kernel_exponent(
    env: &Environment,
    origin: u64,
    t_grid: &[u64],
    mode: HeatMode,
    stream: Option<&mut KeyedStream>,
) -> Result<HeatReport, EstimError> {
    if t_grid.len() < 3 {
        return Err(EstimError::Domain("need >= 3 times in the grid".into()));
    }
    let mut sorted = t_grid.to_vec();
    sorted.sort_unstable();
    if sorted[0] == 0 {
        return Err(EstimError::Domain("t must be >= 1".into()));
    }
    let (p_hat, boundary_mass, ci) = match mode {
        HeatMode::Exact { radius } => {
            let (p, bm) = exact_returns(env, origin, &sorted, radius)?;
            (p, Some(bm), None)
        }
        HeatMode::MonteCarlo { trials } => {
            let stream = stream
                .ok_or_else(|| EstimError::Domain("Monte Carlo mode needs a stream".into()))?;
            let p = mc_returns(env, origin, &sorted, trials, stream);
            (p, None, Some(trials))
        }
    };
    if p_hat.iter().any(|&p| p <= 0.0) {
        return Err(EstimError::Degenerate(
            "zero returns at some grid time; widen trials or truncate the grid".into(),
        ));
    }
    let lx: Vec<f64> = sorted.iter().map(|&t| (t as f64).ln()).collect();
    let ly: Vec<f64> = p_hat.iter().map(|p| p.ln()).collect();
    let slope = ls_slope(&lx, &ly);
    let ci_half_width = match ci {
        // Exact mode: residual standard error of the slope (model misfit,
        // since there is no sampling noise).
        None => slope_se(&lx, &ly),
        // MC mode: binomial noise propagated through the regression.
        Some(trials) => {
            let var: f64 = p_hat
                .iter()
                .map(|&p| (1.0 - p) / (p * trials as f64))
                .sum::<f64>()
                / p_hat.len() as f64;
            (slope_se(&lx, &ly).powi(2) + var).sqrt() * 1.96
        }
    };
    let boundary_flag = boundary_mass.is_some_and(|m| m > 1e-3);
    Ok(HeatReport {
        slope,
        ci_half_width,
        t_grid: sorted,
        p_hat,
        boundary_mass,
        boundary_flag,
    })
}

fn slope_se(lx: &[f64], ly: &[f64]) -> f64 {
    let n = lx.len() as f64;
    let slope = ls_slope(lx, ly);
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if n <= 2.0 {
        return 0.0;
    }
    let sse: f64 = lx
        .iter()
        .zip(ly)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    (sse / (n - 2.0) / sxx).sqrt()
}

fn exact_returns(
    env: &Environment,
    origin: u64,
    sorted: &[u64],
    radius: i64,
) -> Result<(Vec<f64>, f64), EstimError> {
    let ball = ball_graph(env, origin, radius);
    let n = ball.adj.len();
    if n > 2_000_000 {
        return Err(EstimError::Domain(format!(
            "exact ball too large ({n} vertices)"
        )));
    }
    // Reflect by renormalizing to in-ball neighbors.
    let adj: Vec<Vec<usize>> = ball
        .adj
        .iter()
        .map(|ns| ns.iter().copied().filter(|&u| u != usize::MAX).collect())
        .collect();
    let shell: Vec<bool> = ball
        .adj
        .iter()
        .map(|ns| ns.iter().any(|&u| u == usize::MAX))
        .collect();
    if adj.iter().any(|ns| ns.is_empty()) {
        return Err(EstimError::Degenerate(
            "ball contains a vertex with no in-ball neighbors".into(),
        ));
    }
    let t_max = *sorted.last().unwrap() as usize + 1;
    let mut mass = vec![0.0f64; n];
    mass[ball.center] = 1.0;
    let mut returns = vec![0.0f64; t_max + 1];
    let mut boundary_mass = 0.0f64;
    for t in 1..=t_max {
        let mut next = vec![0.0f64; n];
        for v in 0..n {
            if mass[v] == 0.0 {
                continue;
            }
            let share = mass[v] / adj[v].len() as f64;
            for &u in &adj[v] {
                next[u] += share;
            }
        }
        mass = next;
        returns[t] = mass[ball.center];
        let bm: f64 = (0..n).filter(|&v| shell[v]).map(|v| mass[v]).sum();
        boundary_mass = boundary_mass.max(bm);
    }
    let p = sorted
        .iter()
        .map(|&t| returns[t as usize] + returns[t as usize + 1])
        .collect();
    Ok((p, boundary_mass))
}

fn mc_returns(
    env: &Environment,
    origin: u64,
    sorted: &[u64],
    trials: u64,
    stream: &mut KeyedStream,
) -> Vec<f64> {
    let t_max = *sorted.last().unwrap() as usize + 1;
    let mut hits = vec![0u64; t_max + 1];
    for trial in 0..trials {
        let mut s = stream.fork(&[trial]);
        let mut cur = origin;
        for t in 1..=t_max {
            let deg = env.degree(cur);
            cur = env.neighbor(cur, s.index(deg));
            if cur == origin {
                hits[t] += 1;
            }
        }
    }
    sorted
        .iter()
        .map(|&t| (hits[t as usize] + hits[t as usize + 1]) as f64 / trials as f64)
        .collect()
}

//! Displacement scaling exponents from log-log regression over a dyadic grid.

use crate::hill::EstimError;
use crate::stats::{ls_slope, mean};
use percolation_core::rng::KeyedStream;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScalingStatistic {
    /// Median of |X_n| — robust under heavy tails.
    MedianAbs,
    /// Root-mean-square of X_n — the natural diffusive statistic.
    Rms,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub slope: f64,
    /// Bootstrap half-width of a 95% percentile interval (resampling walks
    /// within each grid point).
    pub ci_half_width: f64,
    pub n_grid: Vec<u64>,
    pub statistic: ScalingStatistic,
    pub per_n_statistic: Vec<f64>,
}

/// Least-squares slope of `log statistic(|X_n|)` against `log n`.
///
/// `sample` produces the signed endpoint displacement of walk `w` run for `n`
/// steps; the grid must span at least three points (four octaves recommended).
pub fn scaling_exponent(
    sample: &mut dyn FnMut(u64, u64) -> f64,
    n_grid: &[u64],
    walks_per_n: u64,
    statistic: ScalingStatistic,
    stream: &mut KeyedStream,
) -> Result<ScalingReport, EstimError> {
    if n_grid.len() < 3 {
        return Err(EstimError::Domain(format!(
            "need >= 3 grid points, got {}",
            n_grid.len()
        )));
    }
    let per_n: Vec<Vec<f64>> = n_grid
        .iter()
        .map(|&n| (0..walks_per_n).map(|w| sample(n, w)).collect())
        .collect();
    let stat_of = |xs: &[f64]| -> f64 {
        match statistic {
            ScalingStatistic::MedianAbs => {
                crate::stats::median(&xs.iter().map(|x| x.abs()).collect::<Vec<_>>())
            }
            ScalingStatistic::Rms => mean(&xs.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt(),
        }
    };
    let per_n_statistic: Vec<f64> = per_n.iter().map(|xs| stat_of(xs)).collect();
    if per_n_statistic.iter().any(|&s| !(s > 0.0)) {
        return Err(EstimError::Degenerate(
            "statistic vanished at some grid point; log regression undefined".into(),
        ));
    }
    let lx: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = per_n_statistic.iter().map(|s| s.ln()).collect();
    let slope = ls_slope(&lx, &ly);

    let mut boots = Vec::with_capacity(200);
    for _ in 0..200 {
        let ly_b: Vec<f64> = per_n
            .iter()
            .map(|xs| {
                let re: Vec<f64> = (0..xs.len()).map(|_| xs[stream.index(xs.len())]).collect();
                stat_of(&re).max(f64::MIN_POSITIVE).ln()
            })
            .collect();
        boots.push(ls_slope(&lx, &ly_b));
    }
    boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = boots[(boots.len() as f64 * 0.025) as usize];
    let hi = boots[((boots.len() as f64 * 0.975) as usize).min(boots.len() - 1)];
    Ok(ScalingReport {
        slope,
        ci_half_width: 0.5 * (hi - lo),
        n_grid: n_grid.to_vec(),
        statistic,
        per_n_statistic,
    })
}

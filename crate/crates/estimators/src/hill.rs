//! Hill estimation of a power-law tail index with bootstrap intervals.

use percolation_core::rng::KeyedStream;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct TailEstimate {
    pub alpha_hat: f64,
    /// Fraction of top order statistics used.
    pub top_fraction: f64,
    /// Bootstrap half-width of a 95% percentile interval.
    pub ci_half_width: f64,
    pub sample_size: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum EstimError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

const BOOTSTRAP_RESAMPLES: usize = 200;

/// Hill estimator `alpha_hat = k / sum ln(x_(i) / x_(k+1))` over the top
/// `top_fraction` order statistics, with a percentile bootstrap CI.
pub fn hill_tail_index(
    samples: &[f64],
    top_fraction: f64,
    stream: &mut KeyedStream,
) -> Result<TailEstimate, EstimError> {
    if samples.len() < 100 {
        return Err(EstimError::Domain(format!(
            "need >= 100 samples, got {}",
            samples.len()
        )));
    }
    if !(top_fraction > 0.0 && top_fraction <= 0.2) {
        return Err(EstimError::Domain(format!(
            "top_fraction {top_fraction} outside (0, 0.2]"
        )));
    }
    if samples.iter().any(|&x| !(x > 0.0)) {
        return Err(EstimError::Domain("samples must be positive".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = ((samples.len() as f64 * top_fraction) as usize).max(2);
    let alpha_hat = hill_point(&sorted, k)?;

    // Bootstrap over the full sample; each resample re-takes its own top-k.
    let mut boots = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut re: Vec<f64> = (0..samples.len())
            .map(|_| samples[stream.index(samples.len())])
            .collect();
        re.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if let Ok(a) = hill_point(&re, k) {
            boots.push(a);
        }
    }
    if boots.len() < BOOTSTRAP_RESAMPLES / 2 {
        return Err(EstimError::Degenerate(
            "bootstrap collapsed (too many degenerate resamples)".into(),
        ));
    }
    boots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = boots[(boots.len() as f64 * 0.025) as usize];
    let hi = boots[((boots.len() as f64 * 0.975) as usize).min(boots.len() - 1)];
    Ok(TailEstimate {
        alpha_hat,
        top_fraction,
        ci_half_width: 0.5 * (hi - lo),
        sample_size: samples.len(),
    })
}

/// Point estimate on a descending-sorted sample with `k` top statistics.
fn hill_point(desc: &[f64], k: usize) -> Result<f64, EstimError> {
    let pivot = desc[k];
    let sum: f64 = desc[..k].iter().map(|&x| (x / pivot).ln()).sum();
    if sum <= 0.0 {
        return Err(EstimError::Degenerate(
            "zero log-spacings in the top order statistics".into(),
        ));
    }
    Ok(k as f64 / sum)
}

//! Exact stable sampling via the trigonometric (Chambers-Mallows-Stuck)
//! transform of one uniform and one exponential variate.
//!
//! Conventions: `sample_stable_1d` draws standard symmetric alpha-stable
//! variates with characteristic function `exp(-|theta|^alpha)`;
//! `sample_positive_stable` draws the one-sided law normalized to Laplace
//! transform `exp(-u^a)`. Isotropic d-dimensional increments are Gaussian
//! subordination: `sqrt(Lambda) * N(0, 2 I_d)` with `Lambda` positive
//! `(alpha/2)`-stable, which has characteristic function
//! `exp(-|theta|_2^alpha)` and so agrees with the 1-d sampler when d = 1.

use percolation_core::rng::KeyedStream;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StableError {
    #[error("alpha={0} outside (0,2]")]
    BadAlpha(f64),
    #[error("domain error: {0}")]
    Domain(String),
}

fn exp1(stream: &mut KeyedStream) -> f64 {
    -stream.open_unit().ln()
}

/// One standard symmetric alpha-stable variate, cf `exp(-|theta|^alpha)`.
pub fn symmetric_stable(alpha: f64, stream: &mut KeyedStream) -> f64 {
    debug_assert!((0.0..=2.0).contains(&alpha) && alpha > 0.0);
    let v = FRAC_PI_2 * (2.0 * stream.open_unit() - 1.0);
    if alpha == 1.0 {
        return v.tan();
    }
    let w = exp1(stream);
    let av = alpha * v;
    (av.sin() / v.cos().powf(1.0 / alpha)) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

/// `n` i.i.d. standard symmetric alpha-stable variates.
pub fn sample_stable_1d(
    alpha: f64,
    n: usize,
    stream: &mut KeyedStream,
) -> Result<Vec<f64>, StableError> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(StableError::BadAlpha(alpha));
    }
    Ok((0..n).map(|_| symmetric_stable(alpha, stream)).collect())
}

/// One positive a-stable variate with Laplace transform `exp(-u^a)`,
/// `a` in `(0,1)` (Kanter's representation).
pub fn sample_positive_stable(a: f64, stream: &mut KeyedStream) -> f64 {
    debug_assert!(a > 0.0 && a < 1.0);
    let u = PI * stream.open_unit();
    let w = exp1(stream);
    let ratio = (a * u).sin().powf(a) * ((1.0 - a) * u).sin().powf(1.0 - a) / u.sin();
    (ratio.powf(1.0 / (1.0 - a)) / w).powf((1.0 - a) / a)
}

/// One isotropic alpha-stable increment in R^d, cf `exp(-|theta|_2^alpha)`.
pub fn sample_isotropic_increment(
    alpha: f64,
    d: usize,
    stream: &mut KeyedStream,
) -> Result<Vec<f64>, StableError> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(StableError::BadAlpha(alpha));
    }
    if d == 0 {
        return Err(StableError::Domain("d must be >= 1".into()));
    }
    let lambda = sample_positive_stable(alpha / 2.0, stream);
    let sigma = (2.0 * lambda).sqrt();
    let normal = rand_distr::StandardNormal;
    Ok((0..d)
        .map(|_| {
            let g: f64 = rand::Rng::sample(stream, normal);
            sigma * g
        })
        .collect())
}

/// A reference isotropic stable path sampled on a uniform grid of `[0,1]`.
#[derive(Clone, Debug)]
pub struct StablePath {
    pub alpha: f64,
    pub d: usize,
    /// Grid times `t_0 < ... < t_m`.
    pub times: Vec<f64>,
    /// Cumulative values at the grid times, stride `d`.
    pub values: Vec<f64>,
}

/// Samples the path on `m` equal cells; increments over a cell of width `h`
/// scale as `h^{1/alpha}` by self-similarity.
pub fn sample_stable_path(
    alpha: f64,
    d: usize,
    m: usize,
    stream: &mut KeyedStream,
) -> Result<StablePath, StableError> {
    if m == 0 {
        return Err(StableError::Domain("need at least one cell".into()));
    }
    let h = 1.0 / m as f64;
    let scale = h.powf(1.0 / alpha);
    let mut times = Vec::with_capacity(m + 1);
    let mut values = vec![0.0; d];
    times.push(0.0);
    for k in 1..=m {
        times.push(k as f64 * h);
        let inc = if d == 1 {
            vec![symmetric_stable(alpha, stream)]
        } else {
            sample_isotropic_increment(alpha, d, stream)?
        };
        let base = values.len() - d;
        for c in 0..d {
            let prev = values[base + c];
            values.push(prev + scale * inc[c]);
        }
    }
    Ok(StablePath {
        alpha,
        d,
        times,
        values,
    })
}

impl StablePath {
    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.d..(k + 1) * self.d]
    }

    pub fn endpoint(&self) -> &[f64] {
        self.value(self.times.len() - 1)
    }
}

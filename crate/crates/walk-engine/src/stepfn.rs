//! Rescaled cadlag representatives and the L^q distance between them.

use crate::path::WalkPath;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StepFnError {
    #[error("rescaling exponent a={0} must be positive")]
    BadExponent(f64),
    #[error("q={0} must be >= 1")]
    BadQ(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interp {
    /// Right-continuous step function `t -> v_{floor(nt)}`.
    Step,
    /// Linear interpolation between grid values (the Brownian-limit variant).
    Linear,
}

/// Norm applied to the d-vector difference inside the L^q integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorNorm {
    Sup,
    Euclid,
}

/// The rescaled path `t -> n^{-a} (X_{floor(nt)} - X_0)` on `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pub n: usize,
    pub a: f64,
    pub d: usize,
    /// Grid values, stride `d`, length `(n+1)*d`; `v_0 = 0`.
    pub values: Vec<f64>,
    pub interp: Interp,
}

/// Builds the rescaled representative of a path. Values are displacements
/// from the start, so `v_0 = 0`.
pub fn rescale_path(path: &WalkPath, a: f64, interp: Interp) -> Result<StepFunction, StepFnError> {
    if !(a > 0.0) {
        return Err(StepFnError::BadExponent(a));
    }
    let n = path.n();
    let d = path.d;
    let scale = (n.max(1) as f64).powf(-a);
    let mut values = Vec::with_capacity((n + 1) * d);
    let mut dz = vec![0i64; d];
    for i in 0..=n {
        path.displacement(i, &mut dz);
        for c in 0..d {
            values.push(scale * dz[c] as f64);
        }
    }
    Ok(StepFunction {
        n,
        a,
        d,
        values,
        interp,
    })
}

impl StepFunction {
    /// Builds a step function directly from grid values (tests, references).
    pub fn from_values(d: usize, values: Vec<f64>, interp: Interp) -> Self {
        assert!(values.len() % d == 0 && values.len() >= d);
        let n = values.len() / d - 1;
        StepFunction {
            n,
            a: 1.0,
            d,
            values,
            interp,
        }
    }

    pub fn grid_value(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// Evaluates component `c` at time `t` in `[0,1]`.
    pub fn eval(&self, t: f64, c: usize) -> f64 {
        let x = t.clamp(0.0, 1.0) * self.n as f64;
        match self.interp {
            Interp::Step => {
                let i = (x.floor() as usize).min(self.n);
                self.values[i * self.d + c]
            }
            Interp::Linear => {
                let i = (x.floor() as usize).min(self.n.saturating_sub(1));
                let frac = x - i as f64;
                let lo = self.values[i * self.d + c];
                let hi = self.values[(i + 1) * self.d + c];
                lo + frac * (hi - lo)
            }
        }
    }
}

/// `(∫_0^1 |f-g|^q dt)^{1/q}` with the configured pointwise vector norm
/// (sup-norm by default in the estimators).
///
/// For two step functions the integral is computed exactly on the merged
/// breakpoint grid; when either side interpolates linearly, each merged cell
/// is integrated by Simpson's rule on a fixed subdivision.
pub fn lq_distance(
    f: &StepFunction,
    g: &StepFunction,
    q: f64,
    norm: VectorNorm,
) -> Result<f64, StepFnError> {
    if !(q >= 1.0) {
        return Err(StepFnError::BadQ(q));
    }
    assert_eq!(f.d, g.d, "dimension mismatch");
    let diff = |t: f64| -> f64 {
        match norm {
            VectorNorm::Sup => (0..f.d)
                .map(|c| (f.eval(t, c) - g.eval(t, c)).abs())
                .fold(0.0, f64::max),
            VectorNorm::Euclid => (0..f.d)
                .map(|c| {
                    let e = f.eval(t, c) - g.eval(t, c);
                    e * e
                })
                .sum::<f64>()
                .sqrt(),
        }
    };

    // Merged breakpoints i/nf and j/ng.
    let mut cuts: Vec<f64> = (0..=f.n)
        .map(|i| i as f64 / f.n as f64)
        .chain((0..=g.n).map(|j| j as f64 / g.n as f64))
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let piecewise_constant = f.interp == Interp::Step && g.interp == Interp::Step;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let len = t1 - t0;
        if len <= 0.0 {
            continue;
        }
        if piecewise_constant {
            // Value anywhere in the open cell; exact.
            let v = diff(t0 + 0.5 * len);
            total += v.powf(q) * len;
        } else {
            // Composite Simpson on a fixed subdivision of the cell.
            const SUB: usize = 8;
            let h = len / SUB as f64;
            for k in 0..SUB {
                let a = t0 + k as f64 * h;
                let fa = diff(a).powf(q);
                let fm = diff(a + 0.5 * h).powf(q);
                let fb = diff(a + h).powf(q);
                total += h / 6.0 * (fa + 4.0 * fm + fb);
            }
        }
    }
    Ok(total.powf(1.0 / q))
}

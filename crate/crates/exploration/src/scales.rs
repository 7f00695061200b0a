//! Derived length and time scales of the exploration at dyadic level `k`.

use crate::ExploreError;
use serde::Serialize;

/// All scales are pure functions of `(k, s, d)` except `gamma`, which is a
/// free knob (the theory only asserts a small enough value exists), and
/// `rho`, which the clamp rule can pin to its floor; both are left public so
/// experiments can override them.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Scales {
    pub k: u32,
    /// Stability index `alpha = s - d`, in (0, 1) here.
    pub alpha: f64,
    /// Neighborhood exponent: `delta = (1/alpha - 1)/2` capped at 1/2.
    pub delta: f64,
    /// Special-phase exponent, default `delta / 8`.
    pub gamma: f64,
    /// Long-jump threshold before clamping, `k^{-200/(1-alpha)} 2^{k/alpha}`
    /// (0 on underflow, infinity on overflow).
    pub rho_raw: f64,
    /// Clamped threshold actually used: at least 2, saturating at u64::MAX.
    pub rho: u64,
    /// True when the asymptotic formula fell below the floor of 2.
    pub rho_clamped: bool,
    /// Radius of the revealed neighborhoods V_x: `floor(2^{delta k})`, >= 1.
    pub v_radius: i64,
    /// Length of the special phase, `2^{gamma k + 1}` rounded, >= 2.
    pub special_len: u64,
    /// Time cap of the local return probability, `2^{gamma k}` rounded, >= 1.
    pub gamma_cap: u64,
    /// Walk horizon `2^k`.
    pub steps: u64,
}

/// Computes the scales for level `k` in the heavy-tail regime `s in (d, d+1)`.
pub fn scale_parameters(
    k: u32,
    s: f64,
    d: usize,
    gamma_override: Option<f64>,
) -> Result<Scales, ExploreError> {
    let alpha = s - d as f64;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ExploreError::Unsupported(format!(
            "s={s} outside (d, d+1) for d={d}: the exploration scales need alpha in (0,1)"
        )));
    }
    if k == 0 {
        return Err(ExploreError::Domain("k must be >= 1".into()));
    }
    let delta = (0.5 * (1.0 / alpha - 1.0)).min(0.5);
    let gamma = gamma_override.unwrap_or(delta / 8.0);
    if !(gamma > 0.0) {
        return Err(ExploreError::Domain(format!("gamma={gamma} must be > 0")));
    }
    // The thickened-history volume bound behind the coupling; it holds for
    // every alpha in (0,1) with the delta above, so a failure is a bug.
    debug_assert!(1.0 + delta * (d as f64) < d as f64 / alpha);

    // rho in log space: the k^{-200/(1-alpha)} factor underflows f64 at any
    // desk-scale k, and the 2^{k/alpha} factor overflows for large k.
    let ln_rho =
        (k as f64 / alpha) * std::f64::consts::LN_2 - 200.0 / (1.0 - alpha) * (k as f64).ln();
    let rho_raw = ln_rho.exp();
    let (rho, rho_clamped) = if rho_raw < 2.0 {
        (2, true)
    } else if rho_raw >= u64::MAX as f64 {
        (u64::MAX, false)
    } else {
        (rho_raw as u64, false)
    };

    let v_radius = (2f64.powf(delta * k as f64).floor() as i64).max(1);
    let gamma_cap = (2f64.powf(gamma * k as f64).round() as u64).max(1);
    let special_len = (2f64.powf(gamma * k as f64 + 1.0).round() as u64).max(2);
    Ok(Scales {
        k,
        alpha,
        delta,
        gamma,
        rho_raw,
        rho,
        rho_clamped,
        v_radius,
        special_len,
        gamma_cap,
        steps: 1u64 << k.min(63),
    })
}

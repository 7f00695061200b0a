//! Marginal comparison of simulated rescaled walks against reference
//! stable marginals.

use crate::hill::EstimError;
use crate::stats::ks_two_sample;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct MarginalReport {
    pub t_list: Vec<f64>,
    /// Two-sample KS distance per time point.
    pub ks: Vec<f64>,
    /// L^q summary over the quantile-coupled marginals.
    pub lq_summary: f64,
    pub q: f64,
}

/// Per-time KS table plus an L^q summary.
///
/// `sim[i]` and `reference[i]` hold samples of the rescaled marginal at
/// `t_list[i]` (both already on the same calibrated scale). The summary
/// couples the two samples by rank at each time and averages |difference|^q
/// over times — a path-free stand-in for an L^q distance on [0, 1].
pub fn marginal_compare(
    sim: &[Vec<f64>],
    reference: &[Vec<f64>],
    t_list: &[f64],
    q: f64,
) -> Result<MarginalReport, EstimError> {
    if sim.len() != t_list.len() || reference.len() != t_list.len() {
        return Err(EstimError::Domain(
            "sample lists and t_list must have equal length".into(),
        ));
    }
    if t_list.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(EstimError::Domain("every t must lie in (0, 1]".into()));
    }
    if q < 1.0 {
        return Err(EstimError::Domain("q must be >= 1".into()));
    }
    let mut ks = Vec::with_capacity(t_list.len());
    let mut lq_acc = 0.0;
    for (s, r) in sim.iter().zip(reference) {
        if s.is_empty() || r.is_empty() {
            return Err(EstimError::Domain("empty sample at some t".into()));
        }
        ks.push(ks_two_sample(s, r));
        let mut ss = s.clone();
        let mut rr = r.clone();
        ss.sort_by(|a, b| a.partial_cmp(b).unwrap());
        rr.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Rank coupling; unequal sizes pair by quantile position.
        let n = ss.len().min(rr.len());
        let pick = |v: &[f64], i: usize| v[(i * v.len()) / n];
        let mean_q: f64 = (0..n)
            .map(|i| (pick(&ss, i) - pick(&rr, i)).abs().powf(q))
            .sum::<f64>()
            / n as f64;
        lq_acc += mean_q;
    }
    let lq_summary = (lq_acc / t_list.len() as f64).powf(1.0 / q);
    Ok(MarginalReport {
        t_list: t_list.to_vec(),
        ks,
        lq_summary,
        q,
    })
}

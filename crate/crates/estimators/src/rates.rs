//! Ergodic rate estimates for new-vertex counts, per vertex type.
//!
//! A vertex's type is the pair (local return probability bin, local degree);
//! types outside the tracked grid fall into the (0, 0) overflow bin.

use crate::chain::{return_probabilities, ReturnMode};
use crate::hill::EstimError;
use percolation_core::Environment;
use serde::Serialize;
use std::collections::HashMap;
use walk_engine::WalkPath;

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub q_grid: Vec<f64>,
    pub degree_cap: usize,
    pub chi: f64,
    pub n_steps: usize,
    pub walks: usize,
    /// Total new-vertex rate N_n / n, ensemble mean.
    pub c_star_hat: f64,
    /// Per-type rates, keyed (j, m): j in 1..=J for p-bin [q_{j-1}, q_j)
    /// with q_0 = 0, m in 1..=degree_cap; (0, 0) is the overflow bin.
    pub c_table: Vec<((usize, usize), f64)>,
    /// Overflow-bin rate.
    pub c_bar: f64,
    /// Per-walk verdicts: all tracked counting curves stay within chi * n of
    /// their ensemble-rate prediction at every time.
    pub h_pass: Vec<bool>,
    pub h_fraction: f64,
    /// Fraction passing exceeds 1 - chi.
    pub h_threshold_met: bool,
    pub per_walk_total_rate: Vec<f64>,
    /// Plateau diagnostics: (t, ensemble-mean N_t / t) at dyadic t.
    pub plateau: Vec<(u64, f64)>,
}

/// Counts new vertices by type over an ensemble of walks sharing the typing
/// function, and checks the per-walk ergodic deviation events.
///
/// `type_of` maps a (torus-reduced) vertex to its (p-tilde, local degree);
/// it is a closure so fixtures can be typed without an environment.
pub fn new_vertex_rates(
    paths: &[WalkPath],
    type_of: &mut dyn FnMut(u64) -> (f64, usize),
    q_grid: &[f64],
    degree_cap: usize,
    chi: f64,
) -> Result<RateReport, EstimError> {
    if q_grid.is_empty() {
        return Err(EstimError::Domain("empty q_grid".into()));
    }
    if q_grid.windows(2).any(|w| w[0] >= w[1])
        || q_grid[0] <= 0.0
        || *q_grid.last().unwrap() >= 1.0
    {
        return Err(EstimError::Domain(
            "q_grid must be strictly increasing inside (0, 1)".into(),
        ));
    }
    if paths.is_empty() {
        return Err(EstimError::Domain("no paths".into()));
    }
    let n = paths[0].n();
    if paths.iter().any(|p| p.n() != n) || n == 0 {
        return Err(EstimError::Domain("paths must share a positive length".into()));
    }
    let j_bins = q_grid.len();
    // Bin layout: 0 = overflow, then (j-1)*degree_cap + m for tracked types.
    let n_bins = 1 + j_bins * degree_cap;
    let bin_of = |p_tilde: f64, m: usize| -> usize {
        if m == 0 || m > degree_cap || p_tilde >= *q_grid.last().unwrap() {
            return 0;
        }
        let j = q_grid.partition_point(|&q| q <= p_tilde) + 1;
        (j - 1) * degree_cap + m
    };

    // Event lists: per walk, per bin, the step indices of new vertices.
    let mut type_cache: HashMap<u64, usize> = HashMap::new();
    let mut events: Vec<Vec<Vec<u64>>> = Vec::with_capacity(paths.len());
    for path in paths {
        let mut per_bin: Vec<Vec<u64>> = vec![Vec::new(); n_bins];
        for i in 1..=n {
            if !path.new_vertex[i] {
                continue;
            }
            let v = path.vertex_ids[i];
            let bin = *type_cache.entry(v).or_insert_with(|| {
                let (p, m) = type_of(v);
                bin_of(p, m)
            });
            per_bin[bin].push(i as u64);
        }
        events.push(per_bin);
    }

    // Ensemble rates.
    let walks = paths.len() as f64;
    let rate_of_bin: Vec<f64> = (0..n_bins)
        .map(|b| {
            events.iter().map(|e| e[b].len() as f64).sum::<f64>() / (walks * n as f64)
        })
        .collect();
    let per_walk_total_rate: Vec<f64> = events
        .iter()
        .map(|e| e.iter().map(|v| v.len() as f64).sum::<f64>() / n as f64)
        .collect();
    let c_star_hat = crate::stats::mean(&per_walk_total_rate);
    let total_rate = c_star_hat;

    // Per-walk deviation check: every tracked curve (each bin and the total)
    // must satisfy |N_t - t * rate| <= chi * n for all t. Between events the
    // deviation is linear in t, so checking interval endpoints is exact.
    let thresh = chi * n as f64;
    let h_pass: Vec<bool> = events
        .iter()
        .map(|per_bin| {
            let mut ok = true;
            for (b, ev) in per_bin.iter().enumerate() {
                ok &= max_dev(ev, n as u64, rate_of_bin[b]) <= thresh;
            }
            // Total curve: merged events.
            let mut all: Vec<u64> = per_bin.iter().flatten().copied().collect();
            all.sort_unstable();
            ok && max_dev(&all, n as u64, total_rate) <= thresh
        })
        .collect();
    let h_fraction = h_pass.iter().filter(|&&b| b).count() as f64 / walks;

    let mut plateau = Vec::new();
    let mut t = 2u64;
    while t <= n as u64 {
        let mean_nt: f64 = events
            .iter()
            .map(|e| e.iter().map(|ev| ev.partition_point(|&x| x <= t) as f64).sum::<f64>())
            .sum::<f64>()
            / walks;
        plateau.push((t, mean_nt / t as f64));
        t *= 2;
    }

    let c_table: Vec<((usize, usize), f64)> = (1..=j_bins)
        .flat_map(|j| (1..=degree_cap).map(move |m| (j, m)))
        .map(|(j, m)| ((j, m), rate_of_bin[(j - 1) * degree_cap + m]))
        .collect();
    Ok(RateReport {
        q_grid: q_grid.to_vec(),
        degree_cap,
        chi,
        n_steps: n,
        walks: paths.len(),
        c_star_hat,
        c_table,
        c_bar: rate_of_bin[0],
        h_fraction,
        h_threshold_met: h_fraction > 1.0 - chi,
        h_pass,
        per_walk_total_rate,
        plateau,
    })
}

/// max over t in [1, n] of |N_t - t * rate| for a sorted event list.
fn max_dev(events: &[u64], n: u64, rate: f64) -> f64 {
    let mut max = 0.0f64;
    let mut count = 0.0f64;
    for &e in events {
        // Just before the event (count constant, deviation linear in t).
        max = max.max((count - e.saturating_sub(1) as f64 * rate).abs());
        count += 1.0;
        max = max.max((count - e as f64 * rate).abs());
    }
    max.max((count - n as f64 * rate).abs())
}

/// Environment-backed typing function: exact local return probability and
/// local degree on the radius-`radius` ball, cached per vertex.
pub fn env_type_fn<'a>(
    env: &'a Environment,
    radius: i64,
    time_cap: Option<u64>,
) -> impl FnMut(u64) -> (f64, usize) + 'a {
    move |v: u64| {
        let r = return_probabilities(env, v, radius, time_cap, ReturnMode::Exact, None)
            .expect("exact local solve");
        (r.p_tilde, r.d_tilde)
    }
}

//! Empirical frequencies of the rare events the coupling must exclude,
//! evaluated along a walk with the event definitions translated to each
//! step (the time-shifted unions).

use crate::Scales;
use percolation_core::lattice::displacement;
use percolation_core::Environment;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use walk_engine::WalkPath;

#[derive(Clone, Debug, Serialize)]
pub struct EventReport {
    /// Fraction of steps with a long edge at the current vertex.
    pub freq_a: f64,
    /// A long edge whose far end stays unvisited over the special-phase
    /// window.
    pub freq_b: f64,
    /// The walk leaves the `2^{delta k}` ball within `2^{gamma k}` steps.
    pub freq_c: f64,
    /// A long-edge far end is reached without traversing the edge.
    pub freq_d: f64,
    /// A long-edge endpoint carries another edge of length `>= 2^{delta k}`.
    pub freq_e: f64,
    /// The walk returns to a long edge after the special-phase window.
    pub freq_f: f64,
    /// The conjunction A and B and C.
    pub freq_g: f64,
    pub union_g: bool,
    pub union_d: bool,
    pub union_e: bool,
    pub union_f: bool,
    /// Number of step origins scanned.
    pub steps: usize,
    /// Whether the producing coupling raised no error flag, when known.
    pub coupling_success: Option<bool>,
}

fn sup_dist(env: &Environment, u: u64, v: u64) -> u64 {
    let d = env.params.d;
    let mut dz = [0i64; 3];
    displacement(&env.params, u, v, &mut dz[..d]);
    dz[..d].iter().map(|z| z.unsigned_abs()).max().unwrap()
}

fn long_partners(env: &Environment, v: u64, rho: u64) -> Vec<u64> {
    env.long_neighbors(v)
        .iter()
        .map(|&u| u as u64)
        .filter(|&u| sup_dist(env, u, v) > rho)
        .collect()
}

/// Scans one walk on a materialized environment for the events A..G at every
/// translated origin, reporting pointwise frequencies and the time unions.
pub fn event_scan(env: &Environment, path: &WalkPath, scales: &Scales) -> EventReport {
    let n = path.n();
    let rho = scales.rho;
    let window = scales.special_len as usize;
    let cap = scales.gamma_cap as usize;
    let radius = scales.v_radius as u64;

    // First-visit lookup: sorted occurrence lists per vertex.
    let mut occurrences: HashMap<u64, Vec<usize>> = HashMap::new();
    for (t, &v) in path.vertex_ids.iter().enumerate() {
        occurrences.entry(v).or_default().push(t);
    }
    let first_after = |v: u64, t0: usize| -> Option<usize> {
        let occ = occurrences.get(&v)?;
        let idx = occ.partition_point(|&t| t <= t0);
        occ.get(idx).copied()
    };

    let mut counts = [0usize; 7];
    for i in 0..=n {
        let v = path.vertex_ids[i];
        let partners = long_partners(env, v, rho);
        let a = !partners.is_empty();

        // B: every far end stays out of the next special-phase window (the
        // reported event is taken jointly with A so that it is a long-edge
        // event; the bare universal statement is vacuous without one).
        let hi = (i + window).min(n);
        let b = a
            && partners
                .iter()
                .all(|&p| !path.vertex_ids[i + 1..=hi].contains(&p));

        // C: sup-norm displacement exceeds the ball radius within 2^{gamma k}
        // steps.
        let c = (1..=cap.min(n - i)).any(|t| {
            (0..env.params.d)
                .map(|ax| (path.pos(i + t)[ax] - path.pos(i)[ax]).unsigned_abs())
                .max()
                .unwrap()
                > radius
        });

        // D: some far end is reached without the edge being traversed first.
        let d = partners.iter().any(|&p| {
            if let Some(t_star) = first_after(p, i) {
                !(i..t_star).any(|t| {
                    let (x, y) = (path.vertex_ids[t], path.vertex_ids[t + 1]);
                    (x == v && y == p) || (x == p && y == v)
                })
            } else {
                false
            }
        });

        // E: an endpoint of the long edge carries another edge of length at
        // least 2^{delta k} from both endpoints.
        let e = partners.iter().any(|&p| {
            let far_from_both = |u: u64| -> bool {
                u != v && u != p && sup_dist(env, u, v) >= radius && sup_dist(env, u, p) >= radius
            };
            let others = |w: u64| {
                (0..env.degree(w)).map(move |idx| env.neighbor(w, idx))
            };
            others(v).any(far_from_both) || others(p).any(far_from_both)
        });

        // F: the walk comes back to either end after the special window.
        let f = a && {
            let mut ends: Vec<u64> = partners.clone();
            ends.push(v);
            ends
                .iter()
                .any(|&u| first_after(u, i + window - 1).is_some())
        };

        let g = a && b && c;
        for (slot, hit) in [a, b, c, d, e, f, g].into_iter().enumerate() {
            if hit {
                counts[slot] += 1;
            }
        }
    }
    let total = (n + 1) as f64;
    EventReport {
        freq_a: counts[0] as f64 / total,
        freq_b: counts[1] as f64 / total,
        freq_c: counts[2] as f64 / total,
        freq_d: counts[3] as f64 / total,
        freq_e: counts[4] as f64 / total,
        freq_f: counts[5] as f64 / total,
        freq_g: counts[6] as f64 / total,
        union_g: counts[6] > 0,
        union_d: counts[3] > 0,
        union_e: counts[4] > 0,
        union_f: counts[5] > 0,
        steps: n + 1,
        coupling_success: None,
    }
}

/// The long edges (sup-distance > rho) a walk touches: edges with at least
/// one endpoint on the trajectory.
pub fn touched_long_edges(env: &Environment, path: &WalkPath, rho: u64) -> HashSet<(u64, u64)> {
    let mut out = HashSet::new();
    let mut seen = HashSet::new();
    for &v in &path.vertex_ids {
        if !seen.insert(v) {
            continue;
        }
        for p in long_partners(env, v, rho) {
            out.insert((v.min(p), v.max(p)));
        }
    }
    out
}

/// The two-walk co-incidence event: both walks touch the same long edge.
pub fn fstar_pair(env: &Environment, a: &WalkPath, b: &WalkPath, rho: u64) -> bool {
    let ea = touched_long_edges(env, a, rho);
    if ea.is_empty() {
        return false;
    }
    let eb = touched_long_edges(env, b, rho);
    !ea.is_disjoint(&eb)
}

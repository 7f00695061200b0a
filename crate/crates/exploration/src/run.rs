//! The exploration driver: k^3-style walk batches over the lazy registry,
//! with the main/special phase logic and the error flags 1..=6.

use crate::state::{CouplingCase, ExplorationState};
use crate::{scale_parameters, ExploreError};
use percolation_core::lattice::displacement;
use percolation_core::rng::{role, KeyedStream};
use percolation_core::ModelParams;
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::io::{self, Write};
use walk_engine::{run_walk, WalkPath};

/// One transcript line: the flags attached to the arrival at step `i` of
/// walk `ell`.
#[derive(Clone, Debug, Serialize)]
pub struct StepRecord {
    pub ell: u64,
    pub i: u64,
    pub vertex: u64,
    /// Unwrapped position in the walk's own frame.
    pub pos: Vec<i64>,
    /// The special-phase indicator (the paper's A*).
    pub special: bool,
    /// New-long-edge flag (the paper's A); implies a main-phase step.
    pub a: bool,
    /// Error code 0..=6; 0 means no error.
    pub b: u8,
    /// Type bin of a newly visited vertex; (0, 0) is the overflow bin.
    pub j: usize,
    pub m: usize,
    /// True iff this arrival is a tracked new vertex (the paper's N).
    pub n: bool,
    /// Running per-walk count of new vertices in this bin, after this one.
    pub phi: u64,
    /// Local return probability and ball degree; meaningful only when `n`.
    pub p_tilde: f64,
    pub d_tilde: usize,
    /// Displacement to the far end of the accepted long edge, when `a`.
    pub z: Option<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub q_grid: Vec<f64>,
    pub records: Vec<StepRecord>,
    /// Histogram of error codes 0..=6 over all records.
    pub b_counts: [u64; 7],
    pub per_walk_b: Vec<u64>,
}

impl Transcript {
    /// Total number of raised error flags.
    pub fn b_total(&self) -> u64 {
        self.b_counts[1..].iter().sum()
    }

    /// The coupling-success event: no error flag anywhere.
    pub fn coupling_success(&self) -> bool {
        self.b_total() == 0
    }
}

pub struct ExplorationRun {
    pub state: ExplorationState,
    pub transcript: Transcript,
    pub paths: Vec<WalkPath>,
}

/// Default type grid: `J` equally spaced levels in (0, 1), jittered off the
/// small rationals that local return probabilities concentrate on.
pub fn default_q_grid(j_bins: usize) -> Vec<f64> {
    (1..=j_bins)
        .map(|i| i as f64 / (j_bins + 1) as f64 + i as f64 * 1e-9)
        .collect()
}

/// Bookkeeping for one special phase: the long edge `(v, x)`, the two sides
/// of the V* graph, and the side-by-side walk Y while it stays coupled.
struct SpecialCtx {
    v: u64,
    x: u64,
    side_v: HashSet<u64>,
    side_x: HashSet<u64>,
    y_traj: Vec<u64>,
    synced: bool,
    t: u64,
}

impl SpecialCtx {
    fn new(state: &ExplorationState, v: u64, x: u64) -> Self {
        let r = state.scales.v_radius;
        SpecialCtx {
            v,
            x,
            side_v: state.ball(v, r).into_iter().collect(),
            side_x: state.ball(x, r).into_iter().collect(),
            y_traj: vec![v],
            synced: true,
            t: 0,
        }
    }

    /// Is `(from, to)` an edge of the V* graph: the long edge itself, or a
    /// step staying within one side?
    fn is_vstar_edge(&self, from: u64, to: u64) -> bool {
        (from == self.v && to == self.x)
            || (from == self.x && to == self.v)
            || (self.side_v.contains(&from) && self.side_v.contains(&to))
            || (self.side_x.contains(&from) && self.side_x.contains(&to))
    }

    /// The success event of the phase: the walks stayed coupled for the full
    /// phase, and Y settled off the long edge for a clean `2^{gamma k}`
    /// window that started strictly before the phase end.
    fn event_k_holds(&self, gamma_cap: u64, special_len: u64) -> bool {
        if !self.synced {
            return false;
        }
        let t_last = self
            .y_traj
            .iter()
            .rposition(|&y| y == self.v || y == self.x)
            .expect("Y starts on the edge") as u64;
        let tau_star = (t_last + gamma_cap + 1).max(gamma_cap + 1);
        tau_star < special_len
    }
}

/// Runs `walks` sequential walks of `2^k` steps over a fresh lazy registry,
/// recording the coupling flags per step and replaying each trajectory into
/// a [`WalkPath`] over the union of revealed edges.
pub fn run_exploration(
    params: &ModelParams,
    seed: u64,
    k: u32,
    walks: u64,
    gamma_override: Option<f64>,
    rho_override: Option<u64>,
    q_grid: &[f64],
) -> Result<ExplorationRun, ExploreError> {
    let mut scales = scale_parameters(k, params.s, params.d, gamma_override)?;
    // The asymptotic rho formula clamps to its floor at any reachable k, so
    // experiments treat the long-edge threshold as a free knob.
    if let Some(rho) = rho_override {
        if rho < 2 {
            return Err(ExploreError::Domain("rho must be >= 2".into()));
        }
        scales.rho = rho;
        scales.rho_clamped = false;
    }
    if scales.special_len >= scales.steps {
        return Err(ExploreError::Domain(format!(
            "special phase of {} steps does not fit in a walk of {} steps",
            scales.special_len, scales.steps
        )));
    }
    if q_grid.is_empty()
        || q_grid.windows(2).any(|w| w[0] >= w[1])
        || q_grid[0] <= 0.0
        || *q_grid.last().unwrap() >= 1.0
    {
        return Err(ExploreError::Domain(
            "q_grid must be strictly increasing inside (0, 1)".into(),
        ));
    }
    let mut state = ExplorationState::new(*params, seed, scales)?;
    let j_bins = q_grid.len();
    let bin = |p_tilde: f64, d_tilde: usize| -> (usize, usize) {
        if d_tilde >= 1 && d_tilde <= j_bins && p_tilde < q_grid[j_bins - 1] {
            (q_grid.partition_point(|&q| q <= p_tilde) + 1, d_tilde)
        } else {
            (0, 0)
        }
    };

    let n = scales.steps;
    let d = params.d;
    let start = 0u64;
    let mut records = Vec::new();
    let mut b_counts = [0u64; 7];
    let mut per_walk_b = Vec::with_capacity(walks as usize);

    for ell in 1..=walks {
        let mut stream = KeyedStream::new(seed, &[role::WALK, ell]);
        let mut phi: HashMap<(usize, usize), u64> = HashMap::new();
        let mut cur = start;
        let mut pos = vec![0i64; d];
        let mut dz = [0i64; 3];
        let mut special: Option<SpecialCtx> = None;
        let mut pending_b = 0u8;
        let mut walk_b = 0u64;

        for i in 0..=n {
            // Arrival processing at `cur`.
            let in_special = special.is_some();
            let mut a = false;
            let mut b = 0u8;
            let (mut j, mut m) = (0usize, 0usize);
            let mut new_flag = false;
            let mut phi_val = 0u64;
            let (mut p_tilde, mut d_tilde) = (0.0f64, 0usize);
            let mut z = None;

            if let Some(ctx) = special.as_ref() {
                if !state.is_visited(cur) {
                    state.ensure_revealed(cur);
                    state.mark_visited(cur);
                }
                // A second long edge during the phase is a type-four error.
                let stray = state
                    .long_partners(cur)
                    .into_iter()
                    .any(|p| !(cur == ctx.v && p == ctx.x) && !(cur == ctx.x && p == ctx.v));
                if stray {
                    b = 4;
                }
            } else if state.in_w_plus(cur) {
                // Main phase, already-explored vertex: its neighborhood is
                // known; a long edge here is a type-one error.
                state.ensure_revealed(cur);
                if !state.is_visited(cur) {
                    state.mark_visited(cur);
                }
                if !state.long_partners(cur).is_empty() {
                    b = 1;
                }
            } else {
                // Main phase, new vertex: local reveal, typing, long reveal.
                (p_tilde, d_tilde) = state.local_stats(cur);
                (j, m) = bin(p_tilde, d_tilde);
                new_flag = true;
                let c = phi.entry((j, m)).or_insert(0);
                *c += 1;
                phi_val = *c;
                let reveal = state.reveal_long_edges(cur);
                state.mark_visited(cur);
                match reveal.case {
                    CouplingCase::NoLongEdge => {}
                    CouplingCase::Collision => b = 2,
                    CouplingCase::NewLongEdge { far } => {
                        state.ensure_revealed(far);
                        let (_, d_tilde_far) = state.local_stats(far);
                        let deg_v = state.ensure_revealed(cur).len();
                        let deg_x = state.ensure_revealed(far).len();
                        if deg_v != d_tilde + 1 || deg_x != d_tilde_far + 1 {
                            // An extra out-of-ball edge at an endpoint.
                            b = 3;
                        } else {
                            a = true;
                            let mut off = vec![0i64; d];
                            displacement(params, cur, far, &mut off);
                            z = Some(off);
                            special = Some(SpecialCtx::new(&state, cur, far));
                        }
                    }
                }
            }
            if b == 0 && pending_b != 0 {
                b = pending_b;
            }
            pending_b = 0;
            b_counts[b as usize] += 1;
            if b != 0 {
                walk_b += 1;
            }
            records.push(StepRecord {
                ell,
                i,
                vertex: cur,
                pos: pos.clone(),
                special: in_special,
                a,
                b,
                j,
                m,
                n: new_flag,
                phi: phi_val,
                p_tilde,
                d_tilde,
                z,
            });

            // Step selection.
            if i < n {
                let nbrs = state.ensure_revealed(cur).to_vec();
                if nbrs.is_empty() {
                    return Err(ExploreError::Domain(format!("vertex {cur} is isolated")));
                }
                let next = nbrs[stream.index(nbrs.len())];
                if let Some(ctx) = special.as_mut() {
                    if ctx.synced {
                        let y = *ctx.y_traj.last().unwrap();
                        if cur == y && ctx.is_vstar_edge(cur, next) {
                            ctx.y_traj.push(next);
                        } else {
                            // Desync: flagged at the arrival it produces.
                            ctx.synced = false;
                            pending_b = 5;
                        }
                    }
                    ctx.t += 1;
                    if ctx.t == scales.special_len {
                        let ctx = special.take().unwrap();
                        if !ctx.event_k_holds(scales.gamma_cap, scales.special_len)
                            && pending_b == 0
                        {
                            pending_b = 6;
                        }
                    }
                }
                displacement(params, cur, next, &mut dz[..d]);
                for (p, z) in pos.iter_mut().zip(&dz[..d]) {
                    *p += z;
                }
                cur = next;
            }
        }
        per_walk_b.push(walk_b);
    }

    // Replay each walk over the final registry: reveals are monotone and a
    // walk's current vertex is always fully revealed before it steps, so the
    // same stream reproduces the trajectory exactly.
    let mut paths = Vec::with_capacity(walks as usize);
    for ell in 1..=walks {
        let stream = KeyedStream::new(seed, &[role::WALK, ell]);
        let path = run_walk(&mut state, start, n as usize, stream)
            .map_err(|e| ExploreError::Domain(e.to_string()))?;
        paths.push(path);
    }

    Ok(ExplorationRun {
        state,
        transcript: Transcript {
            q_grid: q_grid.to_vec(),
            records,
            b_counts,
            per_walk_b,
        },
        paths,
    })
}

/// Writes the transcript as JSON lines, one record per step.
pub fn write_transcript<W: Write>(transcript: &Transcript, mut w: W) -> io::Result<()> {
    for r in &transcript.records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

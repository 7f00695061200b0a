//! Simulation of the walk on the two-ball graph V*: two balls joined by the
//! long edge, run until the walk has stayed clear of both endpoints for a
//! full window. Records the per-endpoint crossing counts and the final side.

use crate::{excursion_parameter, CoupleError};
use percolation_core::rng::{role, KeyedStream};

/// A small connected graph with a distinguished root (a long-edge endpoint
/// and its revealed ball).
#[derive(Clone, Debug)]
pub struct Ball {
    pub adj: Vec<Vec<usize>>,
    pub root: usize,
}

impl Ball {
    pub fn new(adj: Vec<Vec<usize>>, root: usize) -> Result<Self, CoupleError> {
        let n = adj.len();
        if root >= n {
            return Err(CoupleError::Domain(format!("root {root} out of range")));
        }
        for (u, nbrs) in adj.iter().enumerate() {
            for &v in nbrs {
                if v >= n || v == u {
                    return Err(CoupleError::Domain(format!("bad edge ({u}, {v})")));
                }
                if !adj[v].contains(&u) {
                    return Err(CoupleError::Domain(format!("asymmetric edge ({u}, {v})")));
                }
            }
        }
        // Connectivity from the root.
        let mut seen = vec![false; n];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(CoupleError::Domain("ball is disconnected".into()));
        }
        if adj[root].is_empty() {
            return Err(CoupleError::Domain("root has no ball neighbors".into()));
        }
        Ok(Ball { adj, root })
    }

    /// The root's within-ball degree.
    pub fn degree(&self) -> usize {
        self.adj[self.root].len()
    }

    /// Exact probability that a departure from the root returns to it within
    /// `cap` steps, by forward iteration of the root-absorbed kernel. The
    /// earliest possible return is the second step, so `cap = 1` gives 0.
    pub fn return_probability(&self, cap: u64) -> Result<f64, CoupleError> {
        if cap == 0 {
            return Err(CoupleError::Domain("cap must be >= 1".into()));
        }
        let n = self.adj.len();
        let mut mass = vec![0.0f64; n];
        let share = 1.0 / self.degree() as f64;
        for &v in &self.adj[self.root] {
            mass[v] += share;
        }
        let mut returned = 0.0;
        let mut next = vec![0.0f64; n];
        for _ in 1..cap {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (u, &mu) in mass.iter().enumerate() {
                if mu == 0.0 {
                    continue;
                }
                let share = mu / self.adj[u].len() as f64;
                for &v in &self.adj[u] {
                    if v == self.root {
                        returned += share;
                    } else {
                        next[v] += share;
                    }
                }
            }
            std::mem::swap(&mut mass, &mut next);
        }
        Ok(returned)
    }
}

/// Per-trial crossing statistics of the V* walk.
///
/// `r_v` and `r_x` are the geometric crossing counts of the excursion lemma:
/// the number of crossings each root makes before its own first escaping
/// excursion. The root the walk did not escape from has its excursion
/// sequence continued (step by step, autonomously) past the settling time,
/// since its escape is never observed by the stopped walk.
#[derive(Clone, Debug)]
pub struct VStarReport {
    /// Crossing count of the start-side root before its first escape.
    pub r_v: Vec<u64>,
    /// Crossing count of the far-side root before its first escape.
    pub r_x: Vec<u64>,
    /// Final side at settling time: true when the walk ended in the far ball.
    pub side_x: Vec<bool>,
    pub crossings: Vec<u64>,
    /// Trials where the side differed from the crossing-count prediction
    /// (must be 0: the claim is deterministic).
    pub side_violations: usize,
    /// Trials where the side differed from the crossing parity (must be 0).
    pub parity_violations: usize,
    pub p_tilde_v: f64,
    pub p_tilde_x: f64,
    pub param_v: f64,
    pub param_x: f64,
}

/// Runs `trials` independent V* walks from the root of `ball_v` until the
/// first time the walk has avoided both roots for `cap` consecutive steps.
pub fn simulate_vstar(
    ball_v: &Ball,
    ball_x: &Ball,
    cap: u64,
    trials: u64,
    seed: u64,
) -> Result<VStarReport, CoupleError> {
    let p_v = ball_v.return_probability(cap)?;
    let p_x = ball_x.return_probability(cap)?;
    for (p, tag) in [(p_v, "v"), (p_x, "x")] {
        if p >= 1.0 - 1e-12 {
            return Err(CoupleError::Degenerate(format!(
                "ball {tag} always returns within the window; the walk never settles"
            )));
        }
    }
    let param_v = excursion_parameter(p_v, ball_v.degree())?;
    let param_x = excursion_parameter(p_x, ball_x.degree())?;

    let balls = [ball_v, ball_x];
    let mut report = VStarReport {
        r_v: Vec::with_capacity(trials as usize),
        r_x: Vec::with_capacity(trials as usize),
        side_x: Vec::with_capacity(trials as usize),
        crossings: Vec::with_capacity(trials as usize),
        side_violations: 0,
        parity_violations: 0,
        p_tilde_v: p_v,
        p_tilde_x: p_x,
        param_v,
        param_x,
    };
    for trial in 0..trials {
        let mut stream = KeyedStream::new(seed, &[role::VSTAR, trial]);
        let (mut side, mut at) = (0usize, balls[0].root);
        let mut counts = [0u64, 0u64];
        let mut off = 0u64; // consecutive steps away from both roots
        loop {
            let ball = balls[side];
            let next = if at == ball.root {
                // The cross edge competes with the ball neighbors.
                let pick = stream.index(ball.degree() + 1);
                if pick == 0 {
                    counts[side] += 1;
                    side ^= 1;
                    balls[side].root
                } else {
                    ball.adj[ball.root][pick - 1]
                }
            } else {
                ball.adj[at][stream.index(ball.adj[at].len())]
            };
            at = next;
            if at == balls[side].root {
                off = 0;
            } else {
                off += 1;
                if off == cap {
                    break;
                }
            }
        }
        let side_x = side == 1;
        let observed = counts[0] + counts[1];
        // The walk escaped from `side`; the other root's excursion sequence
        // continues autonomously until its own first escape.
        let loser = side ^ 1;
        counts[loser] += complete_crossings(balls[loser], cap, &mut stream);
        let (r_v, r_x) = (counts[0], counts[1]);

        if side_x != (r_v > r_x) {
            report.side_violations += 1;
        }
        if side_x != (observed % 2 == 1) {
            report.parity_violations += 1;
        }
        report.r_v.push(r_v);
        report.r_x.push(r_x);
        report.side_x.push(side_x);
        report.crossings.push(observed);
    }
    Ok(report)
}

/// Continues a root's excursion sequence (crossings vs ball excursions,
/// step by step) until its first escaping excursion, returning the number of
/// further crossings.
fn complete_crossings(ball: &Ball, cap: u64, stream: &mut KeyedStream) -> u64 {
    let mut crossings = 0u64;
    loop {
        let pick = stream.index(ball.degree() + 1);
        if pick == 0 {
            crossings += 1;
            continue;
        }
        // Ball excursion: escape means no return to the root within `cap`
        // steps of the departure.
        let mut at = ball.adj[ball.root][pick - 1];
        let mut steps = 1u64;
        loop {
            if steps == cap {
                return crossings;
            }
            at = ball.adj[at][stream.index(ball.adj[at].len())];
            steps += 1;
            if at == ball.root {
                break;
            }
        }
    }
}

/// Sup distance between the empirical law of integer samples and Geom(p)
/// with P(G = r) = (1 - p)^r p.
pub fn geom_ks(samples: &[u64], p: f64) -> f64 {
    let n = samples.len() as f64;
    let max = samples.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; max as usize + 1];
    for &s in samples {
        counts[s as usize] += 1;
    }
    let mut emp = 0.0;
    let mut worst: f64 = 0.0;
    for (r, &c) in counts.iter().enumerate() {
        emp += c as f64 / n;
        let model = 1.0 - (1.0 - p).powi(r as i32 + 1);
        worst = worst.max((emp - model).abs());
    }
    worst
}

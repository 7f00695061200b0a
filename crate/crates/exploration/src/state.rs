//! The lazy environment registry behind the exploration process.
//!
//! Edges are pure functions of the seed through the per-edge keyed hash, so
//! "revealing" a vertex means querying every candidate pair once and caching
//! the resulting neighbor list. Determinism makes the registry idempotent and
//! symmetric by construction, and makes replaying a walk over the union of
//! revealed edges reproduce the exploration trajectory exactly.

use crate::{ExploreError, Scales};
use percolation_core::lattice::{displacement, unflatten};
use percolation_core::{edge_present, ModelParams};
use std::collections::{HashMap, HashSet};
use walk_engine::EnvView;

/// How a freshly revealed batch of long edges is classified by the coupling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CouplingCase {
    /// No long edge at the vertex.
    NoLongEdge,
    /// A double long edge or a proximity collision with the explored region:
    /// a type-two error.
    Collision,
    /// Exactly one long edge to a vertex clear of the explored region.
    NewLongEdge { far: u64 },
}

/// Outcome of revealing the long edges at a newly visited vertex.
#[derive(Clone, Debug)]
pub struct LongReveal {
    /// All long-edge partners of the vertex (sup-distance > rho).
    pub partners: Vec<u64>,
    pub case: CouplingCase,
}

pub struct ExplorationState {
    pub params: ModelParams,
    pub seed: u64,
    pub scales: Scales,
    /// Full neighbor lists of revealed vertices, sorted ascending.
    adj: HashMap<u64, Vec<u64>>,
    /// W: vertices visited by any walk so far.
    visited: HashSet<u64>,
    /// W+: W plus far endpoints of long edges out of W.
    w_plus: HashSet<u64>,
    /// Number of full-neighborhood reveals performed (cost diagnostic).
    pub reveal_count: u64,
}

impl ExplorationState {
    pub fn new(params: ModelParams, seed: u64, scales: Scales) -> Result<Self, ExploreError> {
        params.validate().map_err(|e| ExploreError::Domain(e.to_string()))?;
        if (params.s - params.d as f64 - scales.alpha).abs() > 1e-12 {
            return Err(ExploreError::Domain(
                "scales were computed for a different (s, d)".into(),
            ));
        }
        Ok(ExplorationState {
            params,
            seed,
            scales,
            adj: HashMap::new(),
            visited: HashSet::new(),
            w_plus: HashSet::new(),
            reveal_count: 0,
        })
    }

    /// Sup-norm distance between two vertex ids (torus-minimal when periodic).
    pub fn sup_dist(&self, u: u64, v: u64) -> u64 {
        let mut dz = [0i64; 3];
        displacement(&self.params, u, v, &mut dz[..self.params.d]);
        dz[..self.params.d].iter().map(|z| z.unsigned_abs()).max().unwrap()
    }

    /// The full neighbor list of `v`, revealing it on first contact.
    ///
    /// Revealing scans every other vertex of the box (O(volume)); the lazy
    /// backend trades this per-vertex cost for never materializing the whole
    /// environment.
    pub fn ensure_revealed(&mut self, v: u64) -> &[u64] {
        if !self.adj.contains_key(&v) {
            let volume = self.params.volume();
            let mut list: Vec<u64> = (0..volume)
                .filter(|&u| {
                    u != v && edge_present(&self.params, self.seed, v, u).expect("valid distance")
                })
                .collect();
            list.sort_unstable();
            self.adj.insert(v, list);
            self.reveal_count += 1;
        }
        &self.adj[&v]
    }

    /// Long-edge partners of `v` at sup-distance greater than `rho`.
    pub fn long_partners(&mut self, v: u64) -> Vec<u64> {
        let rho = self.scales.rho;
        let nbrs = self.ensure_revealed(v).to_vec();
        nbrs.into_iter().filter(|&u| self.sup_dist(u, v) > rho).collect()
    }

    /// The sup-ball of radius `r` around `v`, clipped or wrapped by boundary.
    pub fn ball(&self, v: u64, r: i64) -> Vec<u64> {
        let d = self.params.d;
        let l = self.params.l;
        let mut center = [0i64; 3];
        unflatten(v, d, l, &mut center[..d]);
        let mut out = Vec::new();
        let mut offset = [-r; 3];
        'outer: loop {
            let mut coords = [0i64; 3];
            let mut ok = true;
            for a in 0..d {
                let c = center[a] + offset[a];
                coords[a] = match self.params.boundary {
                    percolation_core::Boundary::Torus => c.rem_euclid(l),
                    percolation_core::Boundary::Free => {
                        if !(0..l).contains(&c) {
                            ok = false;
                            break;
                        }
                        c
                    }
                };
            }
            if ok {
                out.push(percolation_core::lattice::flatten(&coords[..d], l));
            }
            // Odometer over the offset cube.
            for a in 0..d {
                offset[a] += 1;
                if offset[a] <= r {
                    continue 'outer;
                }
                offset[a] = -r;
            }
            break;
        }
        // Wrapping can alias cells when 2r + 1 >= L.
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Local type of a vertex: the return probability of the walk restricted
    /// to the sup-ball of radius `2^{delta k}` (hitting `v` again within
    /// `2^{gamma k}` steps), and the degree within that ball. A vertex with
    /// no ball-internal neighbor gets the convention `(1, 0)`.
    ///
    /// The ball subgraph is tiny at desk scale, so this is an exact forward
    /// iteration of the restricted kernel; no randomness is consumed.
    pub fn local_stats(&mut self, v: u64) -> (f64, usize) {
        let ball = self.ball(v, self.scales.v_radius);
        let index: HashMap<u64, usize> =
            ball.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let m = ball.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (i, &u) in ball.iter().enumerate() {
            for (j, &w) in ball.iter().enumerate().skip(i + 1) {
                if edge_present(&self.params, self.seed, u, w).expect("valid distance") {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        let center = index[&v];
        let d_tilde = adj[center].len();
        if d_tilde == 0 {
            return (1.0, 0);
        }
        // Forward mass iteration with absorption at the center; mass at a
        // vertex isolated inside the ball is stuck and never returns.
        let mut mass = vec![0.0f64; m];
        for &n in &adj[center] {
            mass[n] = 1.0 / d_tilde as f64;
        }
        let mut returned = 0.0;
        let mut next = vec![0.0f64; m];
        for _ in 1..self.scales.gamma_cap {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (i, &mi) in mass.iter().enumerate() {
                if mi == 0.0 || adj[i].is_empty() {
                    continue;
                }
                let share = mi / adj[i].len() as f64;
                for &n in &adj[i] {
                    if n == center {
                        returned += share;
                    } else {
                        next[n] += share;
                    }
                }
            }
            std::mem::swap(&mut mass, &mut next);
        }
        (returned, d_tilde)
    }

    /// Reveals and classifies the long edges at a newly visited vertex,
    /// exactly as the main-phase coupling does: a double long edge, or a
    /// single one whose far endpoint sits within `2^{delta k + 1}` of the
    /// explored region W+, is a collision (type-two error).
    pub fn reveal_long_edges(&mut self, v: u64) -> LongReveal {
        let partners = self.long_partners(v);
        let case = match partners.as_slice() {
            [] => CouplingCase::NoLongEdge,
            [x] => {
                if self.near_w_plus(*x) {
                    CouplingCase::Collision
                } else {
                    CouplingCase::NewLongEdge { far: *x }
                }
            }
            _ => CouplingCase::Collision,
        };
        LongReveal { partners, case }
    }

    /// Is any W+ vertex within sup-distance `2 * v_radius` of `x` (including
    /// `x` itself)?
    fn near_w_plus(&self, x: u64) -> bool {
        self.ball(x, 2 * self.scales.v_radius)
            .iter()
            .any(|u| self.w_plus.contains(u))
    }

    /// Marks `v` visited and extends W+ with its long-edge partners.
    pub fn mark_visited(&mut self, v: u64) {
        let partners = self.long_partners(v);
        self.visited.insert(v);
        self.w_plus.insert(v);
        self.w_plus.extend(partners);
    }

    pub fn is_visited(&self, v: u64) -> bool {
        self.visited.contains(&v)
    }

    pub fn in_w_plus(&self, v: u64) -> bool {
        self.w_plus.contains(&v)
    }

    pub fn visited_count(&self) -> usize {
        self.visited.len()
    }

    /// All long edges (sup-distance > rho) among revealed vertices, as
    /// ordered pairs `u < v`.
    pub fn revealed_long_edges(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for (&v, nbrs) in &self.adj {
            for &u in nbrs {
                if u > v && self.sup_dist(u, v) > self.scales.rho {
                    out.push((v, u));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Unwrapped coordinates of a vertex id (for transcript records).
    pub fn coords(&self, v: u64) -> Vec<i64> {
        let mut out = vec![0i64; self.params.d];
        unflatten(v, self.params.d, self.params.l, &mut out);
        out
    }
}

impl EnvView for ExplorationState {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn neighbors(&mut self, v: u64, out: &mut Vec<u64>) {
        out.clear();
        out.extend_from_slice(self.ensure_revealed(v));
    }

    fn step_displacement(&self, from: u64, to: u64, out: &mut [i64]) {
        displacement(&self.params, from, to, out);
    }
}

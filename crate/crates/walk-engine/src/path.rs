//! Recorded trajectories.

use crate::view::EnvView;
use percolation_core::rng::KeyedStream;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("start vertex {0} is isolated")]
    IsolatedStart(u64),
    #[error("domain error: {0}")]
    Domain(String),
}

/// A length-n trajectory with everything the estimators consume.
///
/// Positions are unwrapped integer coordinates in Z^d (the walk tracks its
/// displacement even when edges wrap around a torus); `vertex_ids` keeps the
/// torus-reduced graph vertices, and the new-vertex indicators are computed
/// on those ids, since revisiting a wrapped copy is revisiting the vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkPath {
    pub d: usize,
    pub start: u64,
    /// Unwrapped positions, stride `d`, length `(n+1)*d`.
    positions: Vec<i64>,
    /// Torus-reduced vertex at each step, length `n+1`.
    pub vertex_ids: Vec<u64>,
    /// `new[i] = 1` iff vertex_ids[i] was not visited at any earlier step.
    pub new_vertex: Vec<bool>,
    /// Sup-norm length of each step's displacement, length `n`.
    pub jumps: Vec<i64>,
    /// Walk index within its ensemble.
    pub ell: u64,
    /// Key of the stream that generated the walk.
    pub stream_id: u64,
}

impl WalkPath {
    pub fn n(&self) -> usize {
        self.vertex_ids.len() - 1
    }

    pub fn pos(&self, i: usize) -> &[i64] {
        &self.positions[i * self.d..(i + 1) * self.d]
    }

    /// Displacement from the start, component-wise.
    pub fn displacement(&self, i: usize, out: &mut [i64]) {
        for c in 0..self.d {
            out[c] = self.positions[i * self.d + c] - self.positions[c];
        }
    }

    /// Sup-norm displacement from the start at step `i`.
    pub fn displacement_sup(&self, i: usize) -> i64 {
        (0..self.d)
            .map(|c| (self.positions[i * self.d + c] - self.positions[c]).abs())
            .max()
            .unwrap()
    }

    /// Euclidean displacement from the start at step `i`.
    pub fn displacement_l2(&self, i: usize) -> f64 {
        (0..self.d)
            .map(|c| {
                let dz = (self.positions[i * self.d + c] - self.positions[c]) as f64;
                dz * dz
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Number of distinct vertices seen up to and including step `i`.
    pub fn new_vertex_count(&self, i: usize) -> usize {
        self.new_vertex[..=i].iter().filter(|&&b| b).count()
    }
}

/// Runs one simple random walk for exactly `n` steps.
///
/// Each step is uniform over the current neighbor list using the walk's
/// dedicated stream; new-vertex flags are maintained online via a visited set
/// keyed by torus-reduced ids.
pub fn run_walk<V: EnvView>(
    view: &mut V,
    start: u64,
    n: usize,
    mut stream: KeyedStream,
) -> Result<WalkPath, WalkError> {
    run_walk_with_ell(view, start, n, &mut stream, 0)
}

pub(crate) fn run_walk_with_ell<V: EnvView>(
    view: &mut V,
    start: u64,
    n: usize,
    stream: &mut KeyedStream,
    ell: u64,
) -> Result<WalkPath, WalkError> {
    let d = view.dim();
    let stream_id = stream.id();
    let mut scratch = Vec::new();
    view.neighbors(start, &mut scratch);
    if scratch.is_empty() {
        return Err(WalkError::IsolatedStart(start));
    }

    let mut positions = Vec::with_capacity((n + 1) * d);
    let mut vertex_ids = Vec::with_capacity(n + 1);
    let mut new_vertex = Vec::with_capacity(n + 1);
    let mut jumps = Vec::with_capacity(n);
    let mut visited: HashSet<u64> = HashSet::new();

    // Unwrapped coordinates start at the origin of the walk's own frame; the
    // torus-reduced id carries the absolute location.
    let mut cur_pos = [0i64; 3];
    let mut cur = start;
    positions.extend_from_slice(&cur_pos[..d]);
    vertex_ids.push(cur);
    visited.insert(cur);
    new_vertex.push(true);

    let mut dz = [0i64; 3];
    for _ in 0..n {
        view.neighbors(cur, &mut scratch);
        debug_assert!(!scratch.is_empty(), "walk reached an isolated vertex");
        let next = scratch[stream.index(scratch.len())];
        view.step_displacement(cur, next, &mut dz[..d]);
        for c in 0..d {
            cur_pos[c] += dz[c];
        }
        cur = next;
        positions.extend_from_slice(&cur_pos[..d]);
        vertex_ids.push(cur);
        jumps.push(dz[..d].iter().map(|z| z.abs()).max().unwrap());
        new_vertex.push(visited.insert(cur));
    }

    Ok(WalkPath {
        d,
        start,
        positions,
        vertex_ids,
        new_vertex,
        jumps,
        ell,
        stream_id,
    })
}

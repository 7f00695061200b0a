//! Environment views a walk can step on.
//!
//! A view exposes neighbor lists at torus-reduced vertex ids plus the
//! displacement convention used to unwrap the trajectory into Z^d. Views take
//! `&mut self` so that lazily revealed backends (the exploration registry)
//! can materialize edges on first contact; a materialized [`Environment`] is
//! a read-only implementation.

use percolation_core::lattice::displacement;
use percolation_core::Environment;

pub trait EnvView {
    fn dim(&self) -> usize;

    /// Writes the neighbor ids of `v` into `out` (cleared first).
    fn neighbors(&mut self, v: u64, out: &mut Vec<u64>);

    /// Component-wise displacement of the step `from -> to` (torus-minimal
    /// representative for periodic environments).
    fn step_displacement(&self, from: u64, to: u64, out: &mut [i64]);
}

impl EnvView for &Environment {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn neighbors(&mut self, v: u64, out: &mut Vec<u64>) {
        out.clear();
        let deg = self.degree(v);
        for i in 0..deg {
            out.push(self.neighbor(v, i));
        }
    }

    fn step_displacement(&self, from: u64, to: u64, out: &mut [i64]) {
        displacement(&self.params, from, to, out);
    }
}

/// Explicit adjacency-list graph for fixtures; vertices are points on a line
/// so displacement is the id difference.
#[derive(Clone, Debug)]
pub struct AdjGraph {
    pub adj: Vec<Vec<u64>>,
}

impl EnvView for &AdjGraph {
    fn dim(&self) -> usize {
        1
    }

    fn neighbors(&mut self, v: u64, out: &mut Vec<u64>) {
        out.clear();
        out.extend_from_slice(&self.adj[v as usize]);
    }

    fn step_displacement(&self, from: u64, to: u64, out: &mut [i64]) {
        out[0] = to as i64 - from as i64;
    }
}

//! Environment generation by geometric skip sampling over displacement
//! classes, and adjacency queries on the generated graph.
//!
//! For each displacement class `z` (one canonical representative of `{z,-z}`)
//! the Bernoulli field over base positions is sampled directly at its success
//! positions via geometric skips, so generation costs `O(#classes + #edges)`
//! instead of one coin per pair. The skip stream of a class is keyed by
//! `(seed, SKIP, class id)`; the per-edge one-shot scheme keyed by
//! `(seed, EDGE, min endpoint, max endpoint)` is reserved for lazy exploration
//! and agrees with the skip scheme in distribution.

use crate::error::PercError;
use crate::lattice::{flatten, unflatten, vector_norm};
use crate::params::{connection_probability, Boundary, ModelParams};
use crate::rng::{keyed_unit, role, KeyedStream};

/// One canonical displacement class of unordered pairs.
#[derive(Clone, Copy, Debug)]
pub struct ClassInfo {
    /// Stream key component; stable across runs.
    pub id: u64,
    /// Canonical displacement (first `d` entries meaningful).
    pub z: [i64; 3],
    /// Edge probability at this class's distance.
    pub p: f64,
    /// Number of base positions enumerated for this class.
    pub n_base: u64,
    /// Torus classes with `z = -z mod L`, where each pair appears at two base
    /// positions and only the lexicographically smaller one decides.
    pub self_inverse: bool,
}

/// Enumerates every displacement class at edge-law distance >= 2.
pub fn for_each_class(params: &ModelParams, mut f: impl FnMut(&ClassInfo)) {
    let d = params.d;
    let l = params.l;
    match params.boundary {
        Boundary::Torus => {
            let classes = (l as u64).pow(d as u32);
            let mut z = [0i64; 3];
            for id in 1..classes {
                unflatten(id, d, l, &mut z[..d]);
                // Canonical representative of {z, -z mod L}: the lexicographically
                // smaller one; equality marks a self-inverse class.
                let mut neg = [0i64; 3];
                for i in 0..d {
                    neg[i] = (l - z[i]) % l;
                }
                if z[..d] > neg[..d] {
                    continue;
                }
                let self_inverse = z[..d] == neg[..d];
                let mut t = [0i64; 3];
                for i in 0..d {
                    t[i] = z[i].min(l - z[i]);
                }
                let r = vector_norm(&t[..d], params.norm);
                if r < 2.0 {
                    continue;
                }
                let p = connection_probability(r, params).expect("r >= 2");
                f(&ClassInfo {
                    id,
                    z,
                    p,
                    n_base: classes,
                    self_inverse,
                });
            }
        }
        Boundary::Free => {
            let span = 2 * l - 1; // component values -(L-1)..=(L-1)
            let classes = (span as u64).pow(d as u32);
            let mut z = [0i64; 3];
            for id in 0..classes {
                unflatten(id, d, span, &mut z[..d]);
                for zi in z[..d].iter_mut() {
                    *zi -= l - 1;
                }
                // Canonical representative of {z, -z}: lexicographically positive.
                match z[..d].iter().find(|&&zi| zi != 0) {
                    Some(&first) if first > 0 => {}
                    _ => continue,
                }
                let r = vector_norm(&z[..d], params.norm);
                if r < 2.0 {
                    continue;
                }
                let mut n_base = 1u64;
                for i in 0..d {
                    n_base *= (l - z[i].abs()) as u64;
                }
                if n_base == 0 {
                    continue;
                }
                let p = connection_probability(r, params).expect("r >= 2");
                f(&ClassInfo {
                    id,
                    z,
                    p,
                    n_base,
                    self_inverse: false,
                });
            }
        }
    }
}

/// Expected number of long edges under the model (numeric series oracle).
pub fn expected_long_edge_count(params: &ModelParams) -> f64 {
    let mut total = 0.0;
    for_each_class(params, |c| {
        let pairs = if c.self_inverse {
            c.n_base as f64 / 2.0
        } else {
            c.n_base as f64
        };
        total += pairs * c.p;
    });
    total
}

/// A generated long-range percolation environment. Immutable once built;
/// safe to share across concurrent readers.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub params: ModelParams,
    pub seed: u64,
    /// Sorted long-edge neighbor lists per vertex (distance >= 2 only).
    long: Vec<Vec<u32>>,
    long_edge_count: u64,
}

pub const DEFAULT_MEMORY_BUDGET: u64 = 6 << 30;

/// Generates the environment with the default memory budget.
pub fn generate_environment(params: &ModelParams, seed: u64) -> Result<Environment, PercError> {
    generate_environment_budgeted(params, seed, DEFAULT_MEMORY_BUDGET)
}

/// Generates the environment, refusing up front when the projected memory
/// footprint exceeds `budget` bytes.
pub fn generate_environment_budgeted(
    params: &ModelParams,
    seed: u64,
    budget: u64,
) -> Result<Environment, PercError> {
    params.validate()?;
    let volume = params.volume();
    if volume > u32::MAX as u64 {
        return Err(PercError::Unsupported(format!(
            "volume {volume} exceeds u32 vertex-id range"
        )));
    }
    let expected_edges = expected_long_edge_count(params);
    let required = volume * 40 + (expected_edges * 24.0) as u64;
    if required > budget {
        return Err(PercError::MemoryBudget { required, budget });
    }

    let mut long: Vec<Vec<u32>> = vec![Vec::new(); volume as usize];
    let mut count = 0u64;
    for_each_class(params, |c| {
        if c.p <= 0.0 {
            return;
        }
        let mut stream = KeyedStream::new(seed, &[role::SKIP, c.id]);
        let mut cur = 0u64;
        loop {
            let skip = stream.geometric_skip(c.p);
            cur = match cur.checked_add(skip) {
                Some(x) if x < c.n_base => x,
                _ => break,
            };
            let (u, v) = class_pair(params, c, cur);
            cur += 1;
            if c.self_inverse && v < u {
                // This pair is decided at its partner base position.
                continue;
            }
            long[u as usize].push(v as u32);
            long[v as usize].push(u as u32);
            count += 1;
        }
    });
    for list in long.iter_mut() {
        list.sort_unstable();
        debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
    }
    Ok(Environment {
        params: *params,
        seed,
        long,
        long_edge_count: count,
    })
}

/// Maps a base position of a class to its unordered pair `(u, v)`.
fn class_pair(params: &ModelParams, c: &ClassInfo, base: u64) -> (u64, u64) {
    let d = params.d;
    let l = params.l;
    match params.boundary {
        Boundary::Torus => {
            let mut x = [0i64; 3];
            unflatten(base, d, l, &mut x[..d]);
            let mut y = [0i64; 3];
            for i in 0..d {
                y[i] = (x[i] + c.z[i]).rem_euclid(l);
            }
            (flatten(&x[..d], l), flatten(&y[..d], l))
        }
        Boundary::Free => {
            // Mixed-radix decode of the per-axis base ranges.
            let mut x = [0i64; 3];
            let mut rem = base;
            for i in (0..d).rev() {
                let lo = (-c.z[i]).max(0);
                let width = (l - c.z[i].abs()) as u64;
                x[i] = lo + (rem % width) as i64;
                rem /= width;
            }
            let mut y = [0i64; 3];
            for i in 0..d {
                y[i] = x[i] + c.z[i];
            }
            (flatten(&x[..d], l), flatten(&y[..d], l))
        }
    }
}

impl Environment {
    /// Builds an environment directly from an edge list (snapshot loading and
    /// test fixtures). Edges are symmetrized, sorted, and deduplicated.
    pub fn from_parts(
        params: ModelParams,
        seed: u64,
        edges: impl IntoIterator<Item = (u64, u64)>,
    ) -> Result<Environment, PercError> {
        params.validate()?;
        let volume = params.volume();
        if volume > u32::MAX as u64 {
            return Err(PercError::Unsupported("volume exceeds u32 range".into()));
        }
        let mut long: Vec<Vec<u32>> = vec![Vec::new(); volume as usize];
        let mut count = 0u64;
        for (u, v) in edges {
            if u == v || u >= volume || v >= volume {
                return Err(PercError::Domain(format!("bad edge ({u},{v})")));
            }
            long[u as usize].push(v as u32);
            long[v as usize].push(u as u32);
            count += 1;
        }
        for list in long.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Environment {
            params,
            seed,
            long,
            long_edge_count: count,
        })
    }

    pub fn volume(&self) -> u64 {
        self.params.volume()
    }

    pub fn long_edge_count(&self) -> u64 {
        self.long_edge_count
    }

    pub fn long_neighbors(&self, v: u64) -> &[u32] {
        &self.long[v as usize]
    }

    pub fn has_long_edge(&self, u: u64, v: u64) -> bool {
        self.long[u as usize].binary_search(&(v as u32)).is_ok()
    }

    /// Number of nearest-neighbor edges at `v` (0 unless nn_prob_one).
    pub fn nn_degree(&self, v: u64) -> usize {
        if !self.params.nn_prob_one {
            return 0;
        }
        match self.params.boundary {
            Boundary::Torus => 2 * self.params.d,
            Boundary::Free => (0..2 * self.params.d)
                .filter(|&k| crate::lattice::nn_neighbor(&self.params, v, k).is_some())
                .count(),
        }
    }

    pub fn degree(&self, v: u64) -> usize {
        self.nn_degree(v) + self.long[v as usize].len()
    }

    /// Neighbor `idx` of `v`: nearest neighbors first (axis order), then the
    /// sorted long-edge list.
    pub fn neighbor(&self, v: u64, idx: usize) -> u64 {
        let mut i = idx;
        if self.params.nn_prob_one {
            for k in 0..2 * self.params.d {
                if let Some(u) = crate::lattice::nn_neighbor(&self.params, v, k) {
                    if i == 0 {
                        return u;
                    }
                    i -= 1;
                }
            }
        }
        self.long[v as usize][i] as u64
    }

    /// Iterates all long edges as ordered pairs `(u, v)` with `u < v`, in
    /// lexicographic order.
    pub fn long_edges(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.long.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u64;
            list.iter()
                .map(|&v| v as u64)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }
}

/// The per-edge uniform of the lazy reveal scheme: a pure function of
/// `(seed, min endpoint, max endpoint)`.
pub fn edge_uniform(seed: u64, u: u64, v: u64) -> f64 {
    keyed_unit(seed, &[role::EDGE, u.min(v), u.max(v)])
}

/// Lazy per-edge presence check, consistent across modules for one seed.
pub fn edge_present(params: &ModelParams, seed: u64, u: u64, v: u64) -> Result<bool, PercError> {
    let r = crate::lattice::distance(params, u, v);
    if r < 2.0 {
        return Ok(params.nn_prob_one && r == 1.0);
    }
    let p = connection_probability(r, params)?;
    Ok(edge_uniform(seed, u, v) < p)
}

/// Reports the induced tail constant of the edge law: `p(r) ~ beta r^{-s}`.
pub fn induced_tail_constant(params: &ModelParams) -> f64 {
    params.beta
}

//! Conditionally independent walk ensembles on one environment.

use crate::path::{run_walk_with_ell, WalkError, WalkPath};
use percolation_core::rng::{role, KeyedStream};
use percolation_core::Environment;
use rayon::prelude::*;

/// Runs `count` independent walks on the same environment, in parallel.
///
/// Walk `ell` uses the stream `(master, WALK, ell)`, so results do not depend
/// on scheduling order or worker count.
pub fn run_ensemble(
    env: &Environment,
    start: u64,
    n: usize,
    count: u64,
    master: &KeyedStream,
) -> Result<Vec<WalkPath>, WalkError> {
    (0..count)
        .into_par_iter()
        .map(|ell| {
            let mut stream = master.fork(&[role::WALK, ell]);
            let mut view = env;
            run_walk_with_ell(&mut view, start, n, &mut stream, ell)
        })
        .collect()
}

//! The limiting constant K: Monte Carlo estimation of the side-indicator
//! expectations over the empirical type distribution, assembled against a
//! new-vertex rate table, with the grid-refinement error bound.

use crate::{CoupleError, GeomStream};
use percolation_core::rng::{role, KeyedStream};
use rayon::prelude::*;
use serde::Serialize;

/// Empirical joint law of (local return probability, local degree).
#[derive(Clone, Debug)]
pub struct TypeDistribution {
    pub pairs: Vec<(f64, usize)>,
}

impl TypeDistribution {
    pub fn new(pairs: Vec<(f64, usize)>) -> Result<Self, CoupleError> {
        if pairs.is_empty() {
            return Err(CoupleError::Domain("empty type distribution".into()));
        }
        if pairs.iter().any(|&(p, _)| !(0.0..=1.0).contains(&p)) {
            return Err(CoupleError::Domain("return probabilities must be in [0,1]".into()));
        }
        Ok(TypeDistribution { pairs })
    }

    /// Point mass, for the closed-form fixtures.
    pub fn degenerate(p: f64, d: usize) -> Self {
        TypeDistribution { pairs: vec![(p, d)] }
    }

    fn sample(&self, stream: &mut KeyedStream) -> (f64, usize) {
        self.pairs[stream.index(self.pairs.len())]
    }

    /// Empirical mass of return probabilities at exactly `q`.
    fn atom_mass(&self, q: f64) -> f64 {
        let hits = self.pairs.iter().filter(|&&(p, _)| (p - q).abs() < 1e-12).count();
        hits as f64 / self.pairs.len() as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KReport {
    pub j: usize,
    pub q_grid: Vec<f64>,
    /// sigma\[j-1\]\[m-1\] estimates the side-indicator probability of bin (j, m).
    pub sigma_table: Vec<Vec<f64>>,
    pub c_table: Vec<Vec<f64>>,
    pub k_j: f64,
    /// Grid-coarseness bound: |K_J - K| <= 2 psi_J.
    pub psi_j: f64,
    pub trials: u64,
}

fn threshold(p: f64, m: usize) -> f64 {
    let a = (1.0 - p) * m as f64;
    a / (1.0 + a)
}

/// One Monte Carlo side indicator: R at the bin's upper grid threshold
/// against an independent R~ at a freshly sampled type's threshold.
fn indicator(seed: u64, j: usize, m: usize, trial: u64, q_j: f64, types: &TypeDistribution) -> bool {
    let parts = [j as u64, m as u64, trial];
    let mut ts = KeyedStream::new(seed, &[role::TYPE_SAMPLE, parts[0], parts[1], parts[2]]);
    let (fr, fd) = types.sample(&mut ts);
    let tt = threshold(fr, fd);
    let t = threshold(q_j, m);
    // A zero threshold is an almost-surely infinite geometric value.
    if tt <= 0.0 {
        return false;
    }
    if t <= 0.0 {
        return true;
    }
    let rt = GeomStream::new(KeyedStream::new(seed, &[role::GEOM_RT, parts[0], parts[1], parts[2]]))
        .value(tt)
        .expect("tt in (0,1]");
    let r = GeomStream::new(KeyedStream::new(seed, &[role::GEOM_R, parts[0], parts[1], parts[2]]))
        .value(t)
        .expect("t in (0,1]");
    r > rt
}

/// The grid-coarseness tolerance `max_j 1/(1-q_j) - 1/(1-q_{j-1})`.
pub fn psi(q_grid: &[f64]) -> f64 {
    let mut prev = 0.0;
    let mut worst: f64 = 0.0;
    for &q in q_grid {
        worst = worst.max(1.0 / (1.0 - q) - 1.0 / (1.0 - prev));
        prev = q;
    }
    worst
}

/// Estimates the sigma table by Monte Carlo and assembles `K_J` against the
/// supplied per-bin new-vertex rates `c_table[j-1][m-1]`.
pub fn estimate_k(
    q_grid: &[f64],
    types: &TypeDistribution,
    c_table: &[Vec<f64>],
    trials: u64,
    seed: u64,
) -> Result<KReport, CoupleError> {
    if q_grid.is_empty()
        || q_grid.windows(2).any(|w| w[0] >= w[1])
        || q_grid[0] <= 0.0
        || *q_grid.last().unwrap() >= 1.0
    {
        return Err(CoupleError::Domain(
            "q_grid must be strictly increasing inside (0, 1)".into(),
        ));
    }
    let j_bins = q_grid.len();
    if c_table.len() != j_bins || c_table.iter().any(|row| row.len() != j_bins) {
        return Err(CoupleError::Domain(format!(
            "rate table must be {j_bins} x {j_bins} to match the grid"
        )));
    }
    if c_table.iter().flatten().any(|&c| !(0.0..1.0).contains(&c)) {
        return Err(CoupleError::Domain("rates must lie in [0, 1)".into()));
    }
    if trials == 0 {
        return Err(CoupleError::Domain("trials must be positive".into()));
    }
    for (jj, &q) in q_grid.iter().enumerate() {
        let mass = types.atom_mass(q);
        if mass > 0.01 {
            return Err(CoupleError::ReGrid(format!(
                "type distribution has mass {mass:.3} at q_{} = {q}; jitter the grid",
                jj + 1
            )));
        }
    }

    let mut sigma_table = vec![vec![0.0; j_bins]; j_bins];
    let mut k_j = 0.0;
    for j in 1..=j_bins {
        for m in 1..=j_bins {
            let hits = (0..trials)
                .into_par_iter()
                .filter(|&t| indicator(seed, j, m, t, q_grid[j - 1], types))
                .count();
            let s = hits as f64 / trials as f64;
            sigma_table[j - 1][m - 1] = s;
            k_j += s * c_table[j - 1][m - 1];
        }
    }

    Ok(KReport {
        j: j_bins,
        q_grid: q_grid.to_vec(),
        sigma_table,
        c_table: c_table.to_vec(),
        k_j,
        psi_j: psi(q_grid),
        trials,
    })
}

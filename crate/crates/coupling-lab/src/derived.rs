//! The derived processes: the pooled-increment reconstruction driven by a
//! transcript's type counters, the deterministic-clock version with
//! independent increments, and the transcript-coupled jump path.

use crate::increments::{IncrementPool, JumpLaw};
use crate::CoupleError;
use exploration::StepRecord;
use walk_engine::WalkPath;

/// Scaling and stream context for the derived processes.
#[derive(Clone, Copy, Debug)]
pub struct PoolConfig {
    pub k: u32,
    pub s: f64,
    pub seed: u64,
}

impl PoolConfig {
    /// The spatial rescaling `2^{-k/(s-d)}`.
    pub fn scale(&self, d: usize) -> f64 {
        2f64.powf(-(self.k as f64) / (self.s - d as f64))
    }
}

pub struct DerivedPaths {
    /// Pool increments on the transcript's type-counter clock, rescaled.
    pub x_hat: Vec<[f64; 3]>,
    /// Upper-indicator pool increments on the deterministic clocks
    /// `floor(i * C)`, rescaled; independent increments by construction.
    pub frak_x: Vec<[f64; 3]>,
    pub d: usize,
    pub scale: f64,
}

fn check_records(records: &[StepRecord], allow_flagged: bool) -> Result<u64, CoupleError> {
    let ell = match records.first() {
        Some(r) => r.ell,
        None => return Err(CoupleError::Domain("empty transcript".into())),
    };
    for (i, r) in records.iter().enumerate() {
        if r.ell != ell || r.i != i as u64 {
            return Err(CoupleError::Domain(
                "records must be the consecutive steps of one walk".into(),
            ));
        }
        if r.b != 0 && !allow_flagged {
            return Err(CoupleError::Domain(format!(
                "error flag {} at step {i}; pass allow_flagged to tolerate it",
                r.b
            )));
        }
    }
    Ok(ell)
}

/// Builds both derived processes from one walk's records and the keyed
/// increment pool. The two processes share the pool: the same `(j, m, index)`
/// triple resolves to the same offset draw and geometric streams in both.
#[allow(clippy::too_many_arguments)]
pub fn build_derived_processes(
    records: &[StepRecord],
    law: &JumpLaw,
    q_grid: &[f64],
    types: &[(f64, usize)],
    c_table: &[Vec<f64>],
    cfg: &PoolConfig,
    allow_flagged: bool,
) -> Result<DerivedPaths, CoupleError> {
    let ell = check_records(records, allow_flagged)?;
    let d = law.d;
    if !(cfg.s > d as f64) {
        return Err(CoupleError::Domain(format!("s={} must exceed d={d}", cfg.s)));
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
    let mut pool = IncrementPool::new(law, q_grid, types, cfg.seed)?;
    let scale = cfg.scale(d);
    let n = records.len() - 1;

    // X-hat: walk the records, adding the pooled increment of each tracked
    // new vertex when its actual side indicator fires.
    let mut x_hat = Vec::with_capacity(records.len());
    let mut cum = [0i64; 3];
    for r in records {
        if r.n && r.j > 0 {
            let (_, mid, _) = pool.sigma_triple(ell, r.j, r.m, r.phi, r.p_tilde);
            if mid {
                let w = pool.entry(ell, r.j, r.m, r.phi).w_sum;
                for a in 0..d {
                    cum[a] += w[a];
                }
            }
        }
        let mut v = [0.0; 3];
        for a in 0..d {
            v[a] = cum[a] as f64 * scale;
        }
        x_hat.push(v);
    }

    // Frak-X: per-bin prefix sums of the upper-indicator increments, read
    // off at the deterministic clocks.
    let mut prefix: Vec<Vec<Vec<[i64; 3]>>> = Vec::with_capacity(j_bins);
    for j in 1..=j_bins {
        let mut row = Vec::with_capacity(j_bins);
        for m in 1..=j_bins {
            let max_count = (n as f64 * c_table[j - 1][m - 1]).floor() as u64;
            let mut pref = Vec::with_capacity(max_count as usize + 1);
            let mut acc = [0i64; 3];
            pref.push(acc);
            for i in 1..=max_count {
                let q_hi = q_grid[j - 1];
                let (_, _, up) = pool.sigma_triple(ell, j, m, i, q_hi);
                if up {
                    let w = pool.entry(ell, j, m, i).w_sum;
                    for a in 0..d {
                        acc[a] += w[a];
                    }
                }
                pref.push(acc);
            }
            row.push(pref);
        }
        prefix.push(row);
    }
    let mut frak_x = Vec::with_capacity(records.len());
    for i in 0..=n {
        let mut v = [0.0; 3];
        for j in 0..j_bins {
            for m in 0..j_bins {
                let count = (i as f64 * c_table[j][m]).floor() as usize;
                let acc = prefix[j][m][count.min(prefix[j][m].len() - 1)];
                for a in 0..d {
                    v[a] += acc[a] as f64;
                }
            }
        }
        for x in v.iter_mut() {
            *x *= scale;
        }
        frak_x.push(v);
    }

    Ok(DerivedPaths { x_hat, frak_x, d, scale })
}

/// The transcript-coupled version of the jump path: at each accepted long
/// edge, the jump is the actual edge offset, taken iff the walk settled on
/// the far side of its special phase (nearest endpoint at phase end). Under
/// an error-free transcript this is the process the walk itself tracks.
pub fn coupled_x_hat(
    records: &[StepRecord],
    path: &WalkPath,
    special_len: u64,
    cfg: &PoolConfig,
) -> Result<Vec<[f64; 3]>, CoupleError> {
    check_records(records, true)?;
    let d = path.d;
    if records.len() != path.vertex_ids.len() {
        return Err(CoupleError::Domain("records and path length mismatch".into()));
    }
    let scale = cfg.scale(d);
    let n = path.n();
    let mut out = Vec::with_capacity(records.len());
    let mut cum = [0i64; 3];
    for r in records {
        if let Some(z) = &r.z {
            let i = r.i as usize;
            let end = (i + special_len as usize).min(n);
            let mut to_v = 0i64;
            let mut to_x = 0i64;
            for a in 0..d {
                let delta = path.pos(end)[a] - path.pos(i)[a];
                to_v = to_v.max(delta.abs());
                to_x = to_x.max((delta - z[a]).abs());
            }
            if to_x < to_v {
                for a in 0..d {
                    cum[a] += z[a];
                }
            }
        }
        let mut v = [0.0; 3];
        for a in 0..d {
            v[a] = cum[a] as f64 * scale;
        }
        out.push(v);
    }
    Ok(out)
}

//! Long-jump increment variables: the Bernoulli offset field beyond the
//! threshold, the side indicators, and the keyed pool shared by the derived
//! processes.

use crate::{CoupleError, GeomStream};
use percolation_core::lattice::vector_norm;
use percolation_core::rng::{role, KeyedStream};
use percolation_core::Norm;
use std::collections::{HashMap, HashSet};

/// The offset field law: independent site indicators at every lattice offset
/// with sup-norm in (rho, r_max], each on with rate `beta * ||x||^{-s}`
/// (probability `1 - e^{-rate}`).
///
/// Sampling goes through the equivalent Poisson field: a Poisson number of
/// hits with the total rate, located by inversion on the cumulative rate
/// table, collapsed to indicators. This is exact and costs O(expected hits)
/// per draw after the one-time table build.
pub struct JumpLaw {
    pub d: usize,
    pub rho: u64,
    pub r_max: i64,
    offsets: Vec<[i64; 3]>,
    cum: Vec<f64>,
    total: f64,
    /// Expected number of on sites, sum of 1 - e^{-rate}.
    pub expected_count: f64,
    /// Expected sum of |x| over on sites (sup-norm).
    pub expected_abs_sum: f64,
}

impl JumpLaw {
    pub fn new(
        d: usize,
        s: f64,
        beta: f64,
        norm: Norm,
        rho: u64,
        r_max: i64,
    ) -> Result<Self, CoupleError> {
        if d == 0 || d > 3 || !(s > d as f64) || !(beta > 0.0) || r_max <= rho as i64 {
            return Err(CoupleError::Domain(format!(
                "bad jump law: d={d}, s={s}, beta={beta}, rho={rho}, r_max={r_max}"
            )));
        }
        let mut offsets = Vec::new();
        let mut cum = Vec::new();
        let mut total = 0.0;
        let mut expected_count = 0.0;
        let mut expected_abs_sum = 0.0;
        let mut z = [-r_max; 3];
        for a in d..3 {
            z[a] = 0;
        }
        'outer: loop {
            let sup = z[..d].iter().map(|c| c.unsigned_abs()).max().unwrap();
            if sup > rho {
                let rate = beta * vector_norm(&z[..d], norm).powf(-s);
                total += rate;
                offsets.push(z);
                cum.push(total);
                let p = -(-rate).exp_m1();
                expected_count += p;
                expected_abs_sum += sup as f64 * p;
            }
            for a in 0..d {
                z[a] += 1;
                if z[a] <= r_max {
                    continue 'outer;
                }
                z[a] = -r_max;
            }
            break;
        }
        Ok(JumpLaw {
            d,
            rho,
            r_max,
            offsets,
            cum,
            total,
            expected_count,
            expected_abs_sum,
        })
    }

    /// One draw of the field: the vector sum of on offsets, their sup-norm
    /// sum, and the on count.
    pub fn sample(&self, stream: &mut KeyedStream) -> ([i64; 3], f64, usize) {
        // Poisson(total) by Knuth's product method; total is O(1) here.
        let floor = (-self.total).exp();
        let mut hits = 0usize;
        let mut prod = stream.open_unit();
        while prod >= floor {
            hits += 1;
            prod *= stream.open_unit();
        }
        let mut on = HashSet::new();
        for _ in 0..hits {
            let u = stream.open_unit() * self.total;
            on.insert(self.cum.partition_point(|&c| c <= u).min(self.offsets.len() - 1));
        }
        let mut sum = [0i64; 3];
        let mut abs = 0.0;
        for &i in &on {
            let z = self.offsets[i];
            for a in 0..self.d {
                sum[a] += z[a];
            }
            abs += z[..self.d].iter().map(|c| c.unsigned_abs()).max().unwrap() as f64;
        }
        (sum, abs, on.len())
    }
}

/// The excursion-parameter threshold fed to the geometric processes, with
/// the degenerate boundary mapped to 0 (an infinite geometric value).
fn threshold(p: f64, m: usize) -> f64 {
    let a = (1.0 - p.min(1.0)) * m as f64;
    a / (1.0 + a)
}

/// One pooled increment: the offset-field draw plus the two geometric
/// streams, evaluated lazily at whatever thresholds the indicators need.
pub struct ZEntry {
    pub w_sum: [i64; 3],
    pub w_abs: f64,
    pub w_count: usize,
    r: GeomStream,
    rt_value: Option<u64>,
}

impl ZEntry {
    /// The side indicator at return probability `p` and degree `m`:
    /// R(threshold(p, m)) > R~(threshold of the sampled type). A zero
    /// threshold means an infinite value on that side.
    pub fn sigma(&mut self, p: f64, m: usize) -> bool {
        let t = threshold(p, m);
        match (t > 0.0, self.rt_value) {
            (_, None) => false,
            (false, Some(_)) => true,
            (true, Some(rt)) => self.r.value(t).expect("t in (0,1]") > rt,
        }
    }
}

/// Empirical type distribution and grid shared by the pool.
pub struct IncrementPool<'a> {
    pub law: &'a JumpLaw,
    pub q_grid: &'a [f64],
    pub types: &'a [(f64, usize)],
    pub seed: u64,
    cache: HashMap<(u64, usize, usize, u64), ZEntry>,
}

impl<'a> IncrementPool<'a> {
    pub fn new(
        law: &'a JumpLaw,
        q_grid: &'a [f64],
        types: &'a [(f64, usize)],
        seed: u64,
    ) -> Result<Self, CoupleError> {
        if types.is_empty() {
            return Err(CoupleError::Domain("empty type distribution".into()));
        }
        if q_grid.is_empty()
            || q_grid.windows(2).any(|w| w[0] >= w[1])
            || q_grid[0] <= 0.0
            || *q_grid.last().unwrap() >= 1.0
        {
            return Err(CoupleError::Domain(
                "q_grid must be strictly increasing inside (0, 1)".into(),
            ));
        }
        Ok(IncrementPool { law, q_grid, types, seed, cache: HashMap::new() })
    }

    /// The pooled entry for walk `ell`, bin `(j, m)`, pool index `i`,
    /// creating it from its dedicated streams on first use.
    pub fn entry(&mut self, ell: u64, j: usize, m: usize, i: u64) -> &mut ZEntry {
        let key = (ell, j, m, i);
        let (law, types, seed) = (self.law, self.types, self.seed);
        self.cache.entry(key).or_insert_with(|| {
            let parts = [ell, j as u64, m as u64, i];
            let mut w = KeyedStream::new(seed, &[role::JUMP, parts[0], parts[1], parts[2], parts[3]]);
            let (w_sum, w_abs, w_count) = law.sample(&mut w);
            let mut ts =
                KeyedStream::new(seed, &[role::TYPE_SAMPLE, parts[0], parts[1], parts[2], parts[3]]);
            let (fr, fd) = types[ts.index(types.len())];
            let tt = threshold(fr, fd);
            let rt_value = if tt > 0.0 {
                let rt =
                    KeyedStream::new(seed, &[role::GEOM_RT, parts[0], parts[1], parts[2], parts[3]]);
                Some(GeomStream::new(rt).value(tt).expect("tt in (0,1]"))
            } else {
                None
            };
            let r = GeomStream::new(KeyedStream::new(
                seed,
                &[role::GEOM_R, parts[0], parts[1], parts[2], parts[3]],
            ));
            ZEntry { w_sum, w_abs, w_count, r, rt_value }
        })
    }

    /// The three side indicators (lower, actual, upper) of a tracked bin
    /// `(j, m)` with actual return probability `p_tilde`. The overflow bin
    /// `(0, 0)` has all three identically zero.
    pub fn sigma_triple(
        &mut self,
        ell: u64,
        j: usize,
        m: usize,
        i: u64,
        p_tilde: f64,
    ) -> (bool, bool, bool) {
        if j == 0 || m == 0 {
            return (false, false, false);
        }
        let (q_lo, q_hi) = (if j >= 2 { self.q_grid[j - 2] } else { 0.0 }, self.q_grid[j - 1]);
        let e = self.entry(ell, j, m, i);
        // Larger return probability -> smaller threshold -> larger R value,
        // so the indicators are monotone in the probability slot.
        (e.sigma(q_lo, m), e.sigma(p_tilde, m), e.sigma(q_hi, m))
    }
}

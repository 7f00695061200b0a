//! Deterministic keyed randomness shared by every module in the workspace.
//!
//! Everything random in the laboratory is a pure function of a 64-bit master
//! seed plus a *key*: a role constant and a few indices identifying the
//! consumer (an edge, a displacement class, a walk, a Monte Carlo trial, ...).
//! Two schemes are built on the same mixer:
//!
//! * one-shot uniforms, e.g. the per-edge uniform `u(seed, min(u,v), max(u,v))`
//!   used by the exploration registry and the monotone-in-beta coupling;
//! * counter-based streams ([`KeyedStream`]), used wherever a consumer needs a
//!   sequence of variates. Streams keyed by disjoint tuples are independent
//!   and may be consumed in any order, which is what makes ensembles
//!   order-independent and parallelizable.

/// Golden-ratio increment of the SplitMix64 generator.
pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective mixer with good avalanche behavior.
#[inline]
pub fn mix(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Role constants keeping unrelated consumers on disjoint streams.
pub mod role {
    /// Per-edge uniform, keyed additionally by (min endpoint, max endpoint).
    pub const EDGE: u64 = 1;
    /// Geometric-skip stream for one displacement class of bulk generation.
    pub const SKIP: u64 = 2;
    /// Step stream of one random walk.
    pub const WALK: u64 = 3;
    /// Uniform stream backing a geometric process R.
    pub const GEOM_R: u64 = 4;
    /// Uniform stream backing a reference geometric process R-tilde.
    pub const GEOM_RT: u64 = 5;
    /// Type samples (local return probability, local degree).
    pub const TYPE_SAMPLE: u64 = 6;
    /// Generic Monte Carlo trial stream.
    pub const TRIAL: u64 = 7;
    /// Stable reference sampler stream.
    pub const STABLE: u64 = 8;
    /// Lattice jump sampler stream.
    pub const JUMP: u64 = 9;
    /// Bootstrap resampling stream.
    pub const BOOTSTRAP: u64 = 10;
    /// Special-phase side-by-side walk on the V* graph.
    pub const VSTAR: u64 = 11;
}

/// Collapses `(seed, parts...)` into one 64-bit stream key.
#[inline]
pub fn key(seed: u64, parts: &[u64]) -> u64 {
    let mut h = mix(seed ^ GOLDEN);
    for &p in parts {
        h = mix(h.wrapping_add(GOLDEN) ^ p);
    }
    h
}

/// One-shot uniform in `[0,1)` for a keyed event.
#[inline]
pub fn keyed_unit(seed: u64, parts: &[u64]) -> f64 {
    u64_to_unit(mix(key(seed, parts)))
}

/// Maps a 64-bit word to `[0,1)` using the top 53 bits.
#[inline]
pub fn u64_to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-based SplitMix64 stream. Cheap to construct, cheap to fork.
#[derive(Clone, Debug)]
pub struct KeyedStream {
    state: u64,
    key: u64,
}

impl KeyedStream {
    pub fn new(seed: u64, parts: &[u64]) -> Self {
        let k = key(seed, parts);
        KeyedStream { state: k, key: k }
    }

    /// The key identifying this stream (recorded in path metadata).
    pub fn id(&self) -> u64 {
        self.key
    }

    /// A child stream keyed by this stream's identity plus `parts`.
    pub fn fork(&self, parts: &[u64]) -> KeyedStream {
        KeyedStream::new(self.key, parts)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0,1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        u64_to_unit(self.next_u64())
    }

    /// Uniform in the open interval `(0,1)`; safe as a log argument.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(p) coin.
    #[inline]
    pub fn coin(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform index in `0..n` by rejection (exactly uniform).
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % n) as usize;
            }
        }
    }

    /// Geometric skip: number of failures before the next Bernoulli(p)
    /// success, via inversion `floor(log u / log(1-p))` with `u` in `(0,1)`.
    /// Returns `u64::MAX` as an "effectively never" sentinel for tiny p.
    pub fn geometric_skip(&mut self, p: f64) -> u64 {
        debug_assert!((0.0..=1.0).contains(&p));
        if p >= 1.0 {
            return 0;
        }
        if p <= 0.0 {
            return u64::MAX;
        }
        let u = self.open_unit();
        let g = (u.ln() / (-p).ln_1p()).floor();
        if g >= u64::MAX as f64 {
            u64::MAX
        } else {
            g as u64
        }
    }
}

impl rand_core::RngCore for KeyedStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        KeyedStream::next_u64(self)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let x = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&x[..chunk.len()]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_disjoint() {
        let mut a = KeyedStream::new(7, &[role::WALK, 0]);
        let mut b = KeyedStream::new(7, &[role::WALK, 0]);
        let mut c = KeyedStream::new(7, &[role::WALK, 1]);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        let zs: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn unit_is_in_range_and_roughly_uniform() {
        let mut s = KeyedStream::new(1, &[role::TRIAL]);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = s.unit();
            assert!((0.0..1.0).contains(&u));
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }

    #[test]
    fn geometric_skip_matches_geometric_mean() {
        let mut s = KeyedStream::new(3, &[role::SKIP, 42]);
        let p = 0.2;
        let n = 200_000;
        let mean = (0..n).map(|_| s.geometric_skip(p) as f64).sum::<f64>() / n as f64;
        let expect = (1.0 - p) / p;
        assert!((mean - expect).abs() < 0.05, "mean {mean} expect {expect}");
    }

    #[test]
    fn geometric_skip_edge_cases() {
        let mut s = KeyedStream::new(3, &[]);
        assert_eq!(s.geometric_skip(1.0), 0);
        assert_eq!(s.geometric_skip(0.0), u64::MAX);
    }
}

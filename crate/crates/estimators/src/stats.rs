//! Shared statistical utilities: empirical distances, intervals, regression.

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a: Vec<f64> = a.to_vec();
    let mut b: Vec<f64> = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        // Advance both pointers through the full tie class before comparing,
        // so identical samples give distance zero.
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// One-sample KS distance against an arbitrary CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = xs.len() as f64;
    let mut d = 0f64;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// KS distance of integer samples against a discrete CDF (sup over the
/// support of the samples and law).
pub fn ks_discrete(samples: &[u64], cdf: impl Fn(u64) -> f64) -> f64 {
    let max = samples.iter().copied().max().unwrap_or(0);
    let n = samples.len() as f64;
    let mut counts = vec![0u64; max as usize + 2];
    for &x in samples {
        counts[x as usize] += 1;
    }
    let mut acc = 0u64;
    let mut d = 0f64;
    for r in 0..counts.len() {
        acc += counts[r];
        d = d.max((acc as f64 / n - cdf(r as u64)).abs());
    }
    d
}

/// Wilson score interval for a binomial proportion at z = 1.96.
pub fn wilson_ci(successes: u64, trials: u64) -> (f64, f64) {
    let z = 1.96f64;
    let n = trials as f64;
    if trials == 0 {
        return (0.0, 1.0);
    }
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The exact interval lies in [0, 1] and brackets p; roundoff can
    // overshoot at the degenerate proportions, so clamp both ends.
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    sxy / sxx
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

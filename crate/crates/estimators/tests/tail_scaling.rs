use estimators::{hill_tail_index, scaling_exponent, ScalingStatistic};
use percolation_core::rng::{role, KeyedStream};
use percolation_core::ModelParams;
use stable_ref::discrete_reference_path;

fn stream(tag: u64) -> KeyedStream {
    KeyedStream::new(0xE57, &[role::TRIAL, tag])
}

#[test]
fn hill_on_exact_pareto() {
    // Pareto(alpha = 1) by inversion: X = 1/U.
    let mut s = stream(1);
    let xs: Vec<f64> = (0..1_000_000).map(|_| 1.0 / s.open_unit()).collect();
    let est = hill_tail_index(&xs, 0.01, &mut stream(2)).unwrap();
    assert!(
        (est.alpha_hat - 1.0).abs() < 0.02,
        "alpha_hat {}",
        est.alpha_hat
    );
    assert!(est.ci_half_width > 0.0 && est.ci_half_width < 0.1);
    // The CI should cover the truth.
    assert!((est.alpha_hat - 1.0).abs() < 2.0 * est.ci_half_width + 0.02);
}

#[test]
fn hill_matches_top_k_mle_exactly() {
    // The Hill estimator *is* the conditional MLE on the top order
    // statistics; verify against an independent implementation of the MLE
    // formula written differently (mean of logs minus log pivot).
    let mut s = stream(3);
    let xs: Vec<f64> = (0..10_000).map(|_| (1.0 / s.open_unit()).powf(2.0)).collect();
    let est = hill_tail_index(&xs, 0.05, &mut stream(4)).unwrap();
    let mut sorted = xs.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let k = (xs.len() as f64 * 0.05) as usize;
    let mean_log: f64 = sorted[..k].iter().map(|x| x.ln()).sum::<f64>() / k as f64;
    let mle = 1.0 / (mean_log - sorted[k].ln());
    assert!((est.alpha_hat - mle).abs() < 1e-10);
}

#[test]
fn hill_mixture_recovers_tail() {
    // Exponential body plus Pareto(0.8) tail; the top 1% belongs to the
    // Pareto component.
    let mut s = stream(5);
    let xs: Vec<f64> = (0..1_000_000)
        .map(|_| {
            if s.coin(0.5) {
                -s.open_unit().ln()
            } else {
                s.open_unit().powf(-1.0 / 0.8)
            }
        })
        .collect();
    let est = hill_tail_index(&xs, 0.01, &mut stream(6)).unwrap();
    assert!(
        (est.alpha_hat - 0.8).abs() < 0.05,
        "alpha_hat {}",
        est.alpha_hat
    );
}

#[test]
fn hill_domain_and_degenerate_errors() {
    let mut s = stream(7);
    assert!(hill_tail_index(&[1.0; 50], 0.1, &mut s).is_err());
    assert!(hill_tail_index(&vec![1.0; 1000], 0.1, &mut s).is_err()); // constant
    assert!(hill_tail_index(&vec![2.5; 1000], 0.05, &mut s).is_err());
    let mut bad = vec![1.0; 1000];
    bad[3] = -2.0;
    assert!(hill_tail_index(&bad, 0.1, &mut s).is_err());
    let ok: Vec<f64> = (0..1000).map(|_| 1.0 / s.open_unit()).collect();
    assert!(hill_tail_index(&ok, 0.5, &mut s).is_err()); // top_fraction too big
    assert!(hill_tail_index(&ok, 0.0, &mut s).is_err());
}

#[test]
fn scaling_deterministic_linear_path() {
    let grid = [16u64, 64, 256, 1024];
    for stat in [ScalingStatistic::MedianAbs, ScalingStatistic::Rms] {
        let rep = scaling_exponent(
            &mut |n, _| n as f64,
            &grid,
            20,
            stat,
            &mut stream(8),
        )
        .unwrap();
        assert!((rep.slope - 1.0).abs() < 1e-12, "slope {}", rep.slope);
    }
}

#[test]
fn scaling_simple_coin_sums_are_diffusive() {
    let grid = [64u64, 128, 256, 512, 1024];
    let rep = scaling_exponent(
        &mut |n, w| {
            let mut s = stream(9).fork(&[n, w]);
            (0..n).map(|_| if s.coin(0.5) { 1.0 } else { -1.0 }).sum()
        },
        &grid,
        1000,
        ScalingStatistic::Rms,
        &mut stream(10),
    )
    .unwrap();
    assert!((rep.slope - 0.5).abs() < 0.03, "slope {}", rep.slope);
    assert!(rep.ci_half_width < 0.1);
}

#[test]
fn scaling_stable_reference_path() {
    // alpha = s - d = 0.8: median |S_n| grows like n^{1/alpha} = n^{1.25}.
    let params = ModelParams::new(1, 1.8, 1.0, 100);
    let grid = [256u64, 512, 1024, 2048, 4096];
    let rep = scaling_exponent(
        &mut |n, w| {
            let mut s = stream(11).fork(&[n, w]);
            let p = discrete_reference_path(&params, 1 << 30, n as usize, &mut s).unwrap();
            *p.last().unwrap() as f64
        },
        &grid,
        400,
        ScalingStatistic::MedianAbs,
        &mut stream(12),
    )
    .unwrap();
    assert!((rep.slope - 1.25).abs() < 0.1, "slope {}", rep.slope);
}

#[test]
fn scaling_rejects_short_grids() {
    let err = scaling_exponent(
        &mut |n, _| n as f64,
        &[8, 16],
        10,
        ScalingStatistic::Rms,
        &mut stream(13),
    );
    assert!(err.is_err());
    // All-zero statistic is degenerate.
    let err = scaling_exponent(
        &mut |_, _| 0.0,
        &[8, 16, 32],
        10,
        ScalingStatistic::Rms,
        &mut stream(14),
    );
    assert!(err.is_err());
}

use estimators::{
    heat_kernel_exponent, small_jump_mass, small_jump_trend, zmax_tail_check, HeatMode,
};
use percolation_core::rng::{role, KeyedStream};
use percolation_core::{generate_environment, ModelParams};
use stable_ref::discrete_reference_path;
use walk_engine::run_ensemble;

fn stream(tag: u64) -> KeyedStream {
    KeyedStream::new(0x4EA7, &[role::TRIAL, tag])
}

#[test]
fn nn_only_heat_kernel_slope_is_minus_half() {
    let params = ModelParams::new(1, 1.8, 0.0, 1000);
    let env = generate_environment(&params, 1).unwrap();
    let rep = heat_kernel_exponent(
        &env,
        0,
        &[16, 32, 64, 128, 256],
        HeatMode::Exact { radius: 300 },
        None,
    )
    .unwrap();
    assert!((rep.slope + 0.5).abs() < 0.05, "slope {}", rep.slope);
    // The walk never reaches the truncation shell at this horizon.
    assert_eq!(rep.boundary_mass, Some(0.0));
    assert!(!rep.boundary_flag);
}

#[test]
fn heavy_tail_heat_kernel_slope() {
    // d/(s-d) = 1.25 for s = 1.8 in d=1.
    // The decay crosses over from a diffusive-looking transient around
    // t ~ 300 before settling on the heavy-tail exponent; fit past it.
    let params = ModelParams::new(1, 1.8, 1.0, 1 << 17);
    let env = generate_environment(&params, 2).unwrap();
    let rep = heat_kernel_exponent(
        &env,
        0,
        &[1024, 2048, 4096],
        HeatMode::Exact { radius: 60_000 },
        None,
    )
    .unwrap();
    assert!((rep.slope + 1.25).abs() < 0.2, "slope {}", rep.slope);
    // Heavy tails put some mass on the truncation shell, but the radius is
    // wide enough for the horizon: below the 1e-3 contamination target.
    let bm = rep.boundary_mass.unwrap();
    assert!(bm > 0.0 && bm < 1e-3, "boundary mass {bm}");
    assert!(!rep.boundary_flag);
}

#[test]
fn monte_carlo_mode_matches_exact_on_short_horizons() {
    let params = ModelParams::new(1, 1.8, 1.0, 4096);
    let env = generate_environment(&params, 3).unwrap();
    let grid = [4u64, 8, 16, 32];
    let exact = heat_kernel_exponent(&env, 7, &grid, HeatMode::Exact { radius: 500 }, None)
        .unwrap();
    let mut s = stream(1);
    let mc = heat_kernel_exponent(
        &env,
        7,
        &grid,
        HeatMode::MonteCarlo { trials: 200_000 },
        Some(&mut s),
    )
    .unwrap();
    for (p_mc, p_ex) in mc.p_hat.iter().zip(&exact.p_hat) {
        assert!(
            (p_mc - p_ex).abs() < 0.005,
            "MC {p_mc} vs exact {p_ex}"
        );
    }
}

#[test]
fn all_zero_returns_signaled() {
    let params = ModelParams::new(1, 1.8, 0.0, 1000);
    let env = generate_environment(&params, 4).unwrap();
    let mut s = stream(2);
    let err = heat_kernel_exponent(
        &env,
        0,
        &[512, 600, 700],
        HeatMode::MonteCarlo { trials: 1 },
        Some(&mut s),
    );
    assert!(err.is_err(), "single-trial deep horizon must degenerate");
}

#[test]
fn small_jump_mass_trivial_cases() {
    // No jumps at or below rho.
    assert_eq!(small_jump_mass(&[5, -7, 9], 2, 0.8), 0.0);
    // nn-only: every jump is 1, so the statistic is n / n^{1/alpha}.
    let jumps = vec![1i64; 4096];
    let got = small_jump_mass(&jumps, 10, 0.8);
    let want = 4096.0 / 4096f64.powf(1.25);
    assert!((got - want).abs() < 1e-12);
    // And the trend n^{-0.25} is strictly decreasing.
    let trend = small_jump_trend(&jumps, 10, 0.8);
    assert!(trend.windows(2).all(|w| w[1].1 < w[0].1));
}

#[test]
fn ensemble_small_jump_mass_decreases() {
    let params = ModelParams::new(1, 1.8, 1.0, 1_000_000);
    let env = generate_environment(&params, 5).unwrap();
    let master = KeyedStream::new(5, &[role::WALK]);
    let paths = run_ensemble(&env, 0, 1 << 16, 21, &master).unwrap();
    let median = |n: usize| -> f64 {
        let mut vals: Vec<f64> = paths
            .iter()
            .map(|p| small_jump_mass(&p.jumps[..n], 10, 0.8))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals[vals.len() / 2]
    };
    let first = median(1 << 10);
    let last = median(1 << 16);
    assert!(
        last / first < 0.5,
        "ratio {} (first {first}, last {last})",
        last / first
    );
    // Monotone trend across the dyadic range.
    let series: Vec<f64> = (10..=16).map(|k| median(1 << k)).collect();
    assert!(series.windows(2).all(|w| w[1] < w[0]), "{series:?}");
}

#[test]
fn zmax_envelope_on_reference_sums() {
    let params = ModelParams::new(1, 1.8, 1.0, 100);
    let n = 1024usize;
    let samples: Vec<f64> = (0..10_000)
        .map(|i| {
            let mut s = stream(3).fork(&[i]);
            let p = discrete_reference_path(&params, 1 << 30, n, &mut s).unwrap();
            (*p.last().unwrap() as f64).abs() / (n as f64).powf(1.25)
        })
        .collect();
    let rep = zmax_tail_check(&samples, 0.8);
    assert!(!rep.degenerate);
    assert_eq!(rep.violations, 0, "c = {}", rep.c);
    // A doubled exponent claim must fail on the same data.
    let wrong = zmax_tail_check(&samples, 1.6);
    assert!(wrong.violations > 0);
}

#[test]
fn zmax_bounded_samples_degenerate() {
    let rep = zmax_tail_check(&[0.3; 500], 0.8);
    assert!(rep.degenerate);
    assert_eq!(rep.violations, 0);
}

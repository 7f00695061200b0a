//! The K estimator against closed-form geometric-race oracles, the grid
//! refinement bound, and its guard rails.

use coupling_lab::{estimate_k, CoupleError, TypeDistribution};
use percolation_core::rng::{role, KeyedStream};

/// P(G_a > G_b) for independent geometrics with success parameters a, b:
/// b(1-a) / (1 - (1-a)(1-b)).
fn geom_race(a: f64, b: f64) -> f64 {
    b * (1.0 - a) / (1.0 - (1.0 - a) * (1.0 - b))
}

fn param(p: f64, m: usize) -> f64 {
    let a = (1.0 - p) * m as f64;
    a / (1.0 + a)
}

#[test]
fn degenerate_types_match_the_geometric_race() {
    // Point mass at (0, 1): the opponent's parameter is exactly 1/2 and
    // every sigma entry has a closed form. With a fine first grid point the
    // (1,1) entry approaches P(Geom(1/2) > Geom(1/2)) = 1/3.
    let types = TypeDistribution::degenerate(0.0, 1);
    let q_grid = [0.01, 0.3, 0.6, 0.9];
    let c = vec![vec![0.05; 4]; 4];
    let rep = estimate_k(&q_grid, &types, &c, 200_000, 42).unwrap();
    for j in 1..=4 {
        for m in 1..=4 {
            let oracle = geom_race(param(q_grid[j - 1], m), 0.5);
            let got = rep.sigma_table[j - 1][m - 1];
            assert!(
                (got - oracle).abs() < 0.005,
                "sigma[{j}][{m}] = {got} vs oracle {oracle}"
            );
        }
    }
    let near_third = rep.sigma_table[0][0];
    assert!((near_third - 1.0 / 3.0).abs() < 0.01, "{near_third}");
    // K_J assembles the table against the rates.
    let by_hand: f64 = rep
        .sigma_table
        .iter()
        .flatten()
        .zip(rep.c_table.iter().flatten())
        .map(|(s, c)| s * c)
        .sum();
    assert!((rep.k_j - by_hand).abs() < 1e-12);
}

#[test]
fn certain_return_kills_k() {
    // All return probabilities at 1: the opponent never escapes, so every
    // race is lost and K is exactly zero.
    let types = TypeDistribution::degenerate(1.0, 3);
    let q_grid = [0.25, 0.5, 0.75];
    let c = vec![vec![0.1; 3]; 3];
    let rep = estimate_k(&q_grid, &types, &c, 2_000, 1).unwrap();
    assert!(rep.sigma_table.iter().flatten().all(|&s| s == 0.0));
    assert_eq!(rep.k_j, 0.0);
}

/// A synthetic continuous-ish type law and its bin-mass rate table on a
/// given grid, with total new-vertex rate `c_star`.
fn synthetic(grid: &[f64], c_star: f64, deg_cap: usize) -> (TypeDistribution, Vec<Vec<f64>>) {
    let mut stream = KeyedStream::new(1234, &[role::TYPE_SAMPLE]);
    let pairs: Vec<(f64, usize)> = (0..4000)
        .map(|_| (stream.open_unit() * 0.95, 1 + stream.index(deg_cap)))
        .collect();
    let j = grid.len();
    let mut table = vec![vec![0.0; j]; j];
    for &(p, d) in &pairs {
        if d <= j && p < grid[j - 1] {
            let jj = grid.partition_point(|&q| q <= p);
            table[jj][d - 1] += c_star / pairs.len() as f64;
        }
    }
    (TypeDistribution::new(pairs).unwrap(), table)
}

#[test]
fn grid_refinement_stays_within_the_psi_bound() {
    // Doubling the grid moves K_J by at most 2 psi_J of the coarse grid
    // (plus Monte Carlo noise), and K stays within (0, total rate].
    let coarse: Vec<f64> = (1..=4).map(|i| i as f64 / 5.0 + 1e-7).collect();
    let fine: Vec<f64> = (1..=8).map(|i| i as f64 / 10.0 + 1e-7).collect();
    let c_star = 0.5;
    let (types, c4) = synthetic(&coarse, c_star, 4);
    let (_, c8) = synthetic(&fine, c_star, 8);
    let rep4 = estimate_k(&coarse, &types, &c4, 100_000, 7).unwrap();
    let rep8 = estimate_k(&fine, &types, &c8, 100_000, 7).unwrap();
    assert!(
        (rep4.k_j - rep8.k_j).abs() <= 2.0 * rep4.psi_j + 0.01,
        "K_4 = {}, K_8 = {}, 2 psi = {}",
        rep4.k_j,
        rep8.k_j,
        2.0 * rep4.psi_j
    );
    for rep in [&rep4, &rep8] {
        let total: f64 = rep.c_table.iter().flatten().sum();
        assert!(rep.k_j > 0.0 && rep.k_j <= total, "K = {} vs C* = {total}", rep.k_j);
    }
    // psi is the documented spacing maximum.
    let by_hand = (1..=4)
        .map(|i| {
            let (q0, q1) = ((i - 1) as f64 / 5.0, i as f64 / 5.0 + 1e-7);
            1.0 / (1.0 - q1) - 1.0 / (1.0 - if i == 1 { 0.0 } else { q0 + 1e-7 })
        })
        .fold(0.0f64, f64::max);
    assert!((rep4.psi_j - by_hand).abs() < 1e-9);
}

#[test]
fn atom_collisions_request_a_regrid() {
    let mut pairs = vec![(0.5, 1); 30];
    pairs.extend((0..70).map(|i| (i as f64 / 100.0, 1)));
    let types = TypeDistribution::new(pairs).unwrap();
    let c = vec![vec![0.1; 2]; 2];
    let err = estimate_k(&[0.5, 0.8], &types, &c, 100, 3).unwrap_err();
    assert!(matches!(err, CoupleError::ReGrid(_)), "{err}");
    // Jittering the grid off the atom clears it.
    assert!(estimate_k(&[0.5000001, 0.8], &types, &c, 100, 3).is_ok());
}

#[test]
fn estimator_domain_errors_and_report_shape() {
    let types = TypeDistribution::degenerate(0.2, 1);
    let c = vec![vec![0.1; 2]; 2];
    assert!(estimate_k(&[0.8, 0.5], &types, &c, 100, 0).is_err());
    assert!(estimate_k(&[0.5], &types, &c, 100, 0).is_err());
    assert!(estimate_k(&[0.2, 0.8], &types, &c, 0, 0).is_err());
    assert!(estimate_k(&[0.2, 0.8], &types, &vec![vec![1.5; 2]; 2], 100, 0).is_err());
    assert!(TypeDistribution::new(vec![]).is_err());

    let rep = estimate_k(&[0.3, 0.8], &types, &c, 100, 0).unwrap();
    let json = serde_json::to_value(&rep).unwrap();
    for key in ["j", "q_grid", "sigma_table", "c_table", "k_j", "psi_j"] {
        assert!(json.get(key).is_some(), "missing {key} in the K report");
    }
}

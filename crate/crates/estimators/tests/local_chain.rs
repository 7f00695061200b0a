use estimators::chain::{
    ball_graph, harmonic_hitting, return_probabilities, solve_dense, ReturnMode,
};
use percolation_core::rng::{role, KeyedStream};
use percolation_core::{generate_environment, Boundary, Environment, ModelParams};

fn free_line(l: i64, beta: f64, seed: u64) -> Environment {
    let mut p = ModelParams::new(1, 1.8, beta, l);
    p.boundary = Boundary::Free;
    generate_environment(&p, seed).unwrap()
}

#[test]
fn gambler_ruin_line() {
    // Path 0-1-2-3-4, absorb at the ends: h(i) = i/4.
    let adj: Vec<Vec<usize>> = (0..5)
        .map(|i: i64| {
            [i - 1, i + 1]
                .iter()
                .filter(|&&j| (0..5).contains(&j))
                .map(|&j| j as usize)
                .collect()
        })
        .collect();
    let mut boundary = vec![None; 5];
    boundary[0] = Some(0.0);
    boundary[4] = Some(1.0);
    let h = harmonic_hitting(&adj, &boundary);
    for (i, &v) in h.iter().enumerate() {
        assert!((v - i as f64 / 4.0).abs() < 1e-12, "h({i}) = {v}");
    }
}

#[test]
fn star_center_hand_solve() {
    // Center 0 joined to leaves 1, 2, 3; absorb the leaves with values
    // 1, 0, 0. Hand solve: h(0) = (1 + 0 + 0)/3 = 1/3.
    let adj = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
    let boundary = vec![None, Some(1.0), Some(0.0), Some(0.0)];
    let h = harmonic_hitting(&adj, &boundary);
    assert!((h[0] - 1.0 / 3.0).abs() < 1e-12, "h = {}", h[0]);

    // Five-state star with a pendant: 0 center, leaves 1..3 absorbing as
    // above, plus 4 hanging off leaf-position 3 replaced by interior:
    // adj: 0-{1,2,3}, 3-{0,4}, 4 absorbing at 0. Hand solve:
    // h3 = (h0 + 0)/2, h0 = (1 + 0 + h3)/3 => h0 = (1 + h0/2)/3 => h0 = 2/5.
    let adj = vec![vec![1, 2, 3], vec![0], vec![0], vec![0, 4], vec![3]];
    let boundary = vec![None, Some(1.0), Some(0.0), None, Some(0.0)];
    let h = harmonic_hitting(&adj, &boundary);
    assert!((h[0] - 0.4).abs() < 1e-12);
    assert!((h[3] - 0.2).abs() < 1e-12);
}

#[test]
fn solve_dense_recovers_known_solution() {
    let mut s = KeyedStream::new(7, &[role::TRIAL, 1]);
    for n in [1usize, 3, 8, 20] {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| s.unit() + if i == j { n as f64 } else { 0.0 })
                    .collect()
            })
            .collect();
        let x: Vec<f64> = (0..n).map(|_| s.unit() * 2.0 - 1.0).collect();
        let b: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * x[j]).sum())
            .collect();
        let got = solve_dense(a.clone(), b);
        for i in 0..n {
            assert!((got[i] - x[i]).abs() < 1e-9, "n={n} i={i}");
        }
    }
}

#[test]
fn finite_connected_graph_returns_with_probability_one() {
    // nn-only free line fully inside the ball: no absorption anywhere, so
    // the walk returns almost surely.
    let env = free_line(8, 0.0, 1);
    for v in [0u64, 1, 4, 7] {
        let r = return_probabilities(&env, v, 20, None, ReturnMode::Exact, None).unwrap();
        assert!((r.p_tilde - 1.0).abs() < 1e-10, "v={v}: {}", r.p_tilde);
        assert!(!r.isolated);
    }
    assert_eq!(
        return_probabilities(&env, 1, 20, None, ReturnMode::Exact, None)
            .unwrap()
            .d_tilde,
        2
    );
}

#[test]
fn interior_vertex_of_line_with_small_ball() {
    // SRW on Z restricted to a radius-R ball: exiting means stepping to
    // distance R+1, so by gambler's ruin (start at distance 1, absorb at 0
    // and R+1) the return probability is 1 - 1/(R+1).
    let env = free_line(4001, 0.0, 2);
    for radius in [4i64, 16, 64] {
        let r = return_probabilities(&env, 2000, radius, None, ReturnMode::Exact, None).unwrap();
        let want = 1.0 - 1.0 / (radius as f64 + 1.0);
        assert!(
            (r.p_tilde - want).abs() < 1e-9,
            "radius {radius}: {} vs {want}",
            r.p_tilde
        );
    }
}

#[test]
fn capped_solve_approaches_uncapped() {
    let env = free_line(4001, 1.0, 3);
    let uncapped = return_probabilities(&env, 2000, 8, None, ReturnMode::Exact, None).unwrap();
    let capped = return_probabilities(&env, 2000, 8, Some(20_000), ReturnMode::Exact, None)
        .unwrap();
    assert!(
        (capped.p_tilde - uncapped.p_tilde).abs() < 1e-6,
        "{} vs {}",
        capped.p_tilde,
        uncapped.p_tilde
    );
    // And the cap is monotone: fewer steps, less return mass.
    let short = return_probabilities(&env, 2000, 8, Some(4), ReturnMode::Exact, None).unwrap();
    assert!(short.p_tilde < capped.p_tilde);
}

#[test]
fn isolated_vertex_convention() {
    let mut p = ModelParams::new(1, 1.8, 0.0, 50);
    p.boundary = Boundary::Free;
    p.nn_prob_one = false;
    let env = generate_environment(&p, 4).unwrap();
    let r = return_probabilities(&env, 10, 5, None, ReturnMode::Exact, None).unwrap();
    assert!(r.isolated);
    assert_eq!(r.p_tilde, 1.0);
    assert_eq!(r.d_tilde, 0);
}

#[test]
fn monte_carlo_agrees_with_exact_on_random_balls() {
    // 50 random balls, radius 8: |MC - exact| < 3 Wilson widths in >= 95%.
    let mut p = ModelParams::new(1, 1.8, 1.0, 100_000);
    p.boundary = Boundary::Free;
    let env = generate_environment(&p, 5).unwrap();
    let mut pick = KeyedStream::new(5, &[role::TRIAL, 2]);
    let mut good = 0;
    let total = 50;
    for case in 0..total {
        let v = 1000 + pick.index(98_000) as u64;
        let exact = return_probabilities(&env, v, 8, None, ReturnMode::Exact, None).unwrap();
        let mut s = KeyedStream::new(5, &[role::TRIAL, 3, case]);
        let mc = return_probabilities(
            &env,
            v,
            8,
            None,
            ReturnMode::MonteCarlo { trials: 2000 },
            Some(&mut s),
        )
        .unwrap();
        let (lo, hi) = mc.wilson.unwrap();
        let width = hi - lo;
        if (mc.p_tilde - exact.p_tilde).abs() < 3.0 * width {
            good += 1;
        }
        assert_eq!(mc.d_tilde, exact.d_tilde);
    }
    assert!(good * 100 >= total * 95, "only {good}/{total} within band");
}

#[test]
fn occupation_proportional_to_degree_on_fixture() {
    // Exact stationarity check: on a finite fixture the parity-averaged
    // occupation of the kernel converges to degree / 2|E|.
    let mut p = ModelParams::new(1, 1.8, 0.0, 6);
    p.boundary = Boundary::Free;
    let env = Environment::from_parts(p, 0, [(0u64, 2u64), (1, 3)]).unwrap();
    let ball = ball_graph(&env, 2, 10);
    let n = ball.adj.len();
    assert_eq!(n, 6);
    let mut mass = vec![0.0; n];
    mass[ball.center] = 1.0;
    for _ in 0..4000 {
        let mut next = vec![0.0; n];
        for v in 0..n {
            let share = mass[v] / ball.adj[v].len() as f64;
            for &u in &ball.adj[v] {
                next[u] += 0.5 * share;
            }
            next[v] += 0.5 * mass[v]; // lazy step kills parity oscillation
        }
        mass = next;
    }
    let two_e: f64 = ball.adj.iter().map(|a| a.len() as f64).sum();
    for v in 0..n {
        let want = ball.adj[v].len() as f64 / two_e;
        assert!((mass[v] - want).abs() < 1e-9, "v={v}: {} vs {want}", mass[v]);
    }
}

#[test]
fn exact_mode_rejects_oversized_balls() {
    let mut p = ModelParams::new(1, 1.8, 1.0, 100_000);
    p.boundary = Boundary::Free;
    let env = generate_environment(&p, 6).unwrap();
    let err = return_probabilities(&env, 50_000, 2000, None, ReturnMode::Exact, None);
    assert!(err.is_err());
    let err = return_probabilities(
        &env,
        50_000,
        8,
        None,
        ReturnMode::MonteCarlo { trials: 10 },
        None,
    );
    assert!(err.is_err(), "MC without a stream must error");
}

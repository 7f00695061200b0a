use estimators::{cutpoint_chain, diffusivity_regression, median_diffusivity};
use percolation_core::rng::role;
use percolation_core::{generate_environment, Boundary, Environment, ModelParams};

fn free_params(s: f64, beta: f64, l: i64) -> ModelParams {
    let mut p = ModelParams::new(1, s, beta, l);
    p.boundary = Boundary::Free;
    p
}

#[test]
fn nn_only_chain_is_unit_diffusive() {
    let env = generate_environment(&free_params(2.5, 0.0, 200), 1).unwrap();
    let chain = cutpoint_chain(&env).unwrap();
    // Every vertex in 1..=198 is an interior cutpoint; every gap is 1.
    assert_eq!(chain.cutpoints.len(), 198);
    for g in &chain.gaps {
        assert_eq!(g.right - g.left, 1);
        assert!((g.q_forward - 0.5).abs() < 1e-14);
        assert!((g.q_backward - 0.5).abs() < 1e-14);
    }
    assert!((chain.mean_p_spacing - 2.0).abs() < 1e-12);
    assert!((chain.k_star - 1.0).abs() < 1e-12);
    // Quadratic variation of the gap-chain martingale: 2 + 2 = 4.
    assert!((chain.qv_mean - 4.0).abs() < 1e-12);
}

/// Independent relaxation solve of the gap system, as an oracle.
fn relax_h(adj: &[Vec<usize>]) -> Vec<f64> {
    let m = adj.len();
    let mut h = vec![0.5; m];
    h[0] = 0.0;
    h[m - 1] = 1.0;
    for _ in 0..200_000 {
        for v in 1..m - 1 {
            h[v] = adj[v].iter().map(|&u| h[u]).sum::<f64>() / adj[v].len() as f64;
        }
    }
    h
}

#[test]
fn six_vertex_gap_fixture_matches_relaxation_oracle() {
    // Long edge {4, 7} on [0, 12): cutpoints are 0..=3 and 8..=11, so the
    // interesting gap is [3, 8] with the chord inside.
    let env = Environment::from_parts(free_params(2.5, 0.0, 12), 0, [(4u64, 7u64)]).unwrap();
    let chain = cutpoint_chain(&env).unwrap();
    assert_eq!(chain.cutpoints, vec![1, 2, 3, 8, 9, 10]);
    let gap = chain.gaps.iter().find(|g| g.left == 3).unwrap();

    // Oracle: local vertices 0..=5 are lattice 3..=8; edges are the path
    // plus the chord {1, 4}.
    let adj: Vec<Vec<usize>> = vec![
        vec![1],
        vec![0, 2, 4],
        vec![1, 3],
        vec![2, 4],
        vec![3, 5, 1],
        vec![4],
    ];
    let h = relax_h(&adj);
    let want_forward = 0.5 * h[1];
    let want_backward = 0.5 * (1.0 - h[4]);
    assert!((gap.q_forward - want_forward).abs() < 1e-9, "{gap:?}");
    assert!((gap.q_backward - want_backward).abs() < 1e-9);
    // The chord shortens the crossing: easier than the bare 5-step gap.
    assert!(gap.q_forward > 0.5 * (1.0 / 5.0));
    // Unit gaps elsewhere are exact halves.
    let unit = chain.gaps.iter().find(|g| g.left == 1).unwrap();
    assert!((unit.q_forward - 0.5).abs() < 1e-14);
}

#[test]
fn chain_invariants_on_random_environment() {
    let env = generate_environment(&free_params(2.5, 1.0, 40_000), 7).unwrap();
    let chain = cutpoint_chain(&env).unwrap();
    assert!(chain.cutpoints.len() > 100, "degenerate fixture");
    // Exact symmetry of the crossing probabilities.
    assert!(
        chain.max_symmetry_err < 1e-10,
        "symmetry err {}",
        chain.max_symmetry_err
    );
    // Resistance bound 1/Q <= 2 * gap.
    assert!(
        chain.max_resistance_excess <= 1e-9,
        "excess {}",
        chain.max_resistance_excess
    );
    // Row sums over {j-1, j, j+1}: reconstruct Q(j,j) and check.
    for w in chain.gaps.windows(2) {
        let q_self = 1.0 - w[1].q_forward - w[0].q_backward;
        assert!((0.0..=1.0).contains(&q_self));
        let row = w[0].q_backward + q_self + w[1].q_forward;
        assert!((row - 1.0).abs() < 1e-12);
    }
    // Harmonic coordinates are strictly increasing and |p_n| <= 2|c_n|.
    assert!(chain.p.windows(2).all(|w| w[1] > w[0]));
    let c_span = (chain.cutpoints.last().unwrap() - chain.cutpoints[0]) as f64;
    assert!(*chain.p.last().unwrap() <= 2.0 * c_span + 1e-6);
}

#[test]
fn variance_regression_on_simple_coin_sums() {
    // Oracle for the regression itself: i.i.d. +-1 sums have Var(X_n) = n.
    let mut s = percolation_core::rng::KeyedStream::new(3, &[role::TRIAL, 9]);
    let mut by_n = Vec::new();
    for n in [1024u64, 4096] {
        let endpoints: Vec<f64> = (0..2000)
            .map(|_| (0..n).map(|_| if s.coin(0.5) { 1.0 } else { -1.0 }).sum())
            .collect();
        by_n.push((n, endpoints));
    }
    let slope = diffusivity_regression(&by_n).unwrap();
    assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
    assert!(diffusivity_regression(&by_n[..1]).is_err());
}

#[test]
fn k_star_agrees_with_independent_walk_diffusivity() {
    // K* is the diffusivity of the walk indexed by cutpoint visits
    // (Y_i = X at the i-th visit), so the lattice-walk cross-check needs the
    // visit-rate time change: Var-rate of X ~ K* * (visits per step).
    //
    // The walk statistic is the median-calibrated diffusivity rather than a
    // raw variance: for s = 2.5 the jump second moment diverges, so sample
    // variances never settle at these horizons (measured: Var/n still ~1.7x
    // high at n = 2^14) while the median-based estimate is stable.
    let env = generate_environment(&free_params(2.5, 1.0, 1_000_000), 11).unwrap();
    let chain = cutpoint_chain(&env).unwrap();
    let cutset: std::collections::HashSet<u64> =
        chain.cutpoints.iter().map(|&c| c as u64).collect();

    let n = 1usize << 14;
    let walks = 2000u64;
    let mut pick = percolation_core::rng::KeyedStream::new(12, &[role::TRIAL, 2]);
    let mut absd = Vec::with_capacity(walks as usize);
    let mut rate = 0.0;
    for w in 0..walks {
        // Uniform random starts average out the strong local fluctuations of
        // the gap structure (single-start windows are far from ergodic at
        // reachable horizons).
        let start = 100_000 + pick.index(800_000) as u64;
        let stream = percolation_core::rng::KeyedStream::new(12, &[role::WALK, n as u64, w]);
        let path = walk_engine::run_walk(&mut (&env), start, n, stream).unwrap();
        absd.push(((path.pos(n)[0] - path.pos(0)[0]) as f64).abs());
        rate += (1..=n)
            .filter(|&i| cutset.contains(&path.vertex_ids[i]))
            .count() as f64
            / n as f64;
    }
    rate /= walks as f64;
    let k_walk = median_diffusivity(&absd, n as u64).unwrap() / rate;
    let rel = (chain.k_star - k_walk).abs() / k_walk;
    assert!(
        rel < 0.15,
        "K* {} vs walk estimate {k_walk} (rel {rel})",
        chain.k_star
    );
}

#[test]
fn chain_domain_errors() {
    // d=2 is not a cutpoint setting.
    let mut p2 = ModelParams::new(2, 2.5, 1.0, 16);
    p2.boundary = Boundary::Free;
    let env2 = generate_environment(&p2, 1).unwrap();
    assert!(cutpoint_chain(&env2).is_err());
    // Torus boundary rejected.
    let envt = generate_environment(&ModelParams::new(1, 2.5, 0.1, 1000), 1).unwrap();
    assert!(cutpoint_chain(&envt).is_err());
    // A single spanning edge destroys all interior cutpoints.
    let env = Environment::from_parts(free_params(2.5, 0.0, 40), 0, [(0u64, 39u64)]).unwrap();
    assert!(cutpoint_chain(&env).is_err());
}

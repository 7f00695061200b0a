//! Exact absorbing-chain solves on small subgraphs, and the local return
//! probability / local degree they feed.

use percolation_core::lattice::{flatten, unflatten};
use percolation_core::rng::KeyedStream;
use percolation_core::{Boundary, Environment, PercError};
use std::collections::HashMap;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let diag = a[col][col];
        assert!(diag.abs() > 1e-300, "singular system");
        for row in col + 1..n {
            let f = a[row][col] / diag;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Harmonic extension on a finite chain: `h(v) = mean of h over neighbors`
/// at interior vertices, `h` fixed on the boundary (`Some` entries).
/// Neighbor lists index into the same vertex array; entries of `usize::MAX`
/// denote absorbing "outside" states with value 0.
pub fn harmonic_hitting(adj: &[Vec<usize>], boundary: &[Option<f64>]) -> Vec<f64> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for v in 0..n {
        if boundary[v].is_none() {
            index[v] = unknowns.len();
            unknowns.push(v);
        }
    }
    let m = unknowns.len();
    if m == 0 {
        return boundary.iter().map(|b| b.unwrap()).collect();
    }
    let x = if m <= 1024 {
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for (row, &v) in unknowns.iter().enumerate() {
            a[row][row] = 1.0;
            let deg = adj[v].len() as f64;
            assert!(deg > 0.0, "interior vertex {v} has no neighbors");
            for &u in &adj[v] {
                if u == usize::MAX {
                    continue; // outside, value 0
                }
                match boundary[u] {
                    Some(val) => b[row] += val / deg,
                    None => a[row][index[u]] -= 1.0 / deg,
                }
            }
        }
        solve_dense(a, b)
    } else {
        solve_sparse_laplacian(adj, boundary, &index, &unknowns)
    };
    (0..n)
        .map(|v| boundary[v].unwrap_or_else(|| x[index[v]]))
        .collect()
}

/// The same harmonic solve in symmetric Laplacian form (`deg_v x_v - sum of
/// neighbor values = boundary load`), eliminated in the natural vertex order.
///
/// The large systems that reach this path are d=1 chain gaps: a path graph
/// plus the chords that live inside the gap. Under left-to-right elimination
/// the fill-in of pivot `i` stays inside the set of chords crossing `i`, so
/// the factorization is exact and runs in O(sum of squared frontier widths)
/// instead of the dense cubic cost.
fn solve_sparse_laplacian(
    adj: &[Vec<usize>],
    boundary: &[Option<f64>],
    index: &[usize],
    unknowns: &[usize],
) -> Vec<f64> {
    use std::collections::BTreeMap;
    let m = unknowns.len();
    // Upper-triangle rows of the symmetric system (diagonal included).
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
    let mut rhs = vec![0.0; m];
    for (row, &v) in unknowns.iter().enumerate() {
        let deg = adj[v].len() as f64;
        assert!(deg > 0.0, "interior vertex {v} has no neighbors");
        *rows[row].entry(row).or_insert(0.0) += deg;
        for &u in &adj[v] {
            if u == usize::MAX {
                continue; // outside, value 0
            }
            match boundary[u] {
                Some(val) => rhs[row] += val,
                None => {
                    let col = index[u];
                    if col > row {
                        *rows[row].entry(col).or_insert(0.0) -= 1.0;
                    }
                }
            }
        }
    }
    // LDL^T-style forward elimination: row i is final once eliminated, and
    // symmetry supplies the lower-triangle multipliers.
    for i in 0..m {
        let row_i: Vec<(usize, f64)> =
            rows[i].range(i + 1..).map(|(&k, &v)| (k, v)).collect();
        let aii = rows[i][&i];
        assert!(aii > 1e-300, "singular chain system at pivot {i}");
        let rhs_i = rhs[i];
        for (a, &(j, aij)) in row_i.iter().enumerate() {
            let f = aij / aii;
            rhs[j] -= f * rhs_i;
            for &(k, aik) in &row_i[a..] {
                *rows[j].entry(k).or_insert(0.0) -= f * aik;
            }
        }
    }
    let mut x = vec![0.0; m];
    for i in (0..m).rev() {
        let mut acc = rhs[i];
        for (&k, &aik) in rows[i].range(i + 1..) {
            acc -= aik * x[k];
        }
        x[i] = acc / rows[i][&i];
    }
    x
}

/// A ball subgraph around a center vertex: sup-norm ball of the lattice with
/// the environment's edges restricted to it. Neighbors leaving the ball are
/// kept as `usize::MAX` sentinels so callers can treat them as absorbing.
pub struct BallGraph {
    /// Torus-reduced vertex ids, center first is NOT guaranteed; see `index`.
    pub vertices: Vec<u64>,
    pub index: HashMap<u64, usize>,
    /// Env neighbor lists as ball indices (`usize::MAX` = outside).
    pub adj: Vec<Vec<usize>>,
    pub center: usize,
}

pub fn ball_graph(env: &Environment, center: u64, radius: i64) -> BallGraph {
    let p = &env.params;
    let d = p.d;
    let l = p.l;
    let mut c0 = [0i64; 3];
    unflatten(center, d, l, &mut c0[..d]);
    let mut vertices = Vec::new();
    let mut index = HashMap::new();
    // Enumerate the sup-norm ball via an offset odometer.
    let side = 2 * radius + 1;
    let count = (side as u64).pow(d as u32);
    let mut off = [0i64; 3];
    for k in 0..count {
        unflatten(k, d, side, &mut off[..d]);
        let mut c = [0i64; 3];
        let mut ok = true;
        for i in 0..d {
            let raw = c0[i] + off[i] - radius;
            c[i] = match p.boundary {
                Boundary::Torus => raw.rem_euclid(l),
                Boundary::Free => {
                    if !(0..l).contains(&raw) {
                        ok = false;
                        0
                    } else {
                        raw
                    }
                }
            };
        }
        if !ok {
            continue;
        }
        let id = flatten(&c[..d], l);
        if !index.contains_key(&id) {
            index.insert(id, vertices.len());
            vertices.push(id);
        }
    }
    let adj = vertices
        .iter()
        .map(|&v| {
            let deg = env.degree(v);
            (0..deg)
                .map(|i| {
                    let u = env.neighbor(v, i);
                    index.get(&u).copied().unwrap_or(usize::MAX)
                })
                .collect()
        })
        .collect();
    BallGraph {
        center: index[&center],
        vertices,
        index,
        adj,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReturnMode {
    Exact,
    MonteCarlo { trials: u64 },
}

#[derive(Clone, Debug)]
pub struct LocalReturn {
    /// Local return probability (return to the center before exiting the
    /// ball, and before the optional time cap).
    pub p_tilde: f64,
    /// Local degree: environment neighbors of the center inside the ball.
    pub d_tilde: usize,
    /// Set when the center has no neighbors in the ball (`p_tilde = 1` by
    /// convention).
    pub isolated: bool,
    /// Wilson interval of the Monte Carlo estimate, when applicable.
    pub wilson: Option<(f64, f64)>,
}

/// Local return probability and local degree of `v` in the radius-`radius`
/// sup-norm ball.
pub fn return_probabilities(
    env: &Environment,
    v: u64,
    radius: i64,
    time_cap: Option<u64>,
    mode: ReturnMode,
    stream: Option<&mut KeyedStream>,
) -> Result<LocalReturn, PercError> {
    let ball = ball_graph(env, v, radius);
    let d_tilde = ball.adj[ball.center]
        .iter()
        .filter(|&&u| u != usize::MAX)
        .count();
    if d_tilde == 0 {
        // No local neighbors: excursions cannot happen; flagged convention.
        return Ok(LocalReturn {
            p_tilde: 1.0,
            d_tilde: 0,
            isolated: true,
            wilson: None,
        });
    }
    match mode {
        ReturnMode::Exact => {
            if ball.vertices.len() > 2000 {
                return Err(PercError::Unsupported(format!(
                    "exact mode requires ball <= 2000 vertices, got {}",
                    ball.vertices.len()
                )));
            }
            let p = match time_cap {
                None => exact_uncapped(&ball),
                Some(cap) => exact_capped(&ball, cap),
            };
            Ok(LocalReturn {
                p_tilde: p,
                d_tilde,
                isolated: false,
                wilson: None,
            })
        }
        ReturnMode::MonteCarlo { trials } => {
            let stream = stream.ok_or_else(|| {
                PercError::Domain("Monte Carlo mode needs a stream".into())
            })?;
            let cap = time_cap.unwrap_or(u64::MAX);
            let mut hits = 0u64;
            for _ in 0..trials {
                if simulate_return(&ball, cap, stream) {
                    hits += 1;
                }
            }
            Ok(LocalReturn {
                p_tilde: hits as f64 / trials as f64,
                d_tilde,
                isolated: false,
                wilson: Some(crate::stats::wilson_ci(hits, trials)),
            })
        }
    }
}

fn exact_uncapped(ball: &BallGraph) -> f64 {
    // h(u) = P_u(hit center before exiting the ball); center is boundary 1,
    // outside is 0. The return probability averages h over the center's
    // transition distribution (full environment degree).
    let n = ball.adj.len();
    let mut boundary = vec![None; n];
    boundary[ball.center] = Some(1.0);
    let h = harmonic_hitting(&ball.adj, &boundary);
    let deg = ball.adj[ball.center].len() as f64;
    ball.adj[ball.center]
        .iter()
        .map(|&u| if u == usize::MAX { 0.0 } else { h[u] })
        .sum::<f64>()
        / deg
}

fn exact_capped(ball: &BallGraph, cap: u64) -> f64 {
    // Forward mass iteration with absorption at the center and outside.
    let n = ball.adj.len();
    let mut mass = vec![0.0; n];
    let mut returned = 0.0;
    // First step out of the center.
    let deg = ball.adj[ball.center].len() as f64;
    for &u in &ball.adj[ball.center] {
        if u != usize::MAX {
            mass[u] += 1.0 / deg;
        }
    }
    for _ in 1..cap {
        let mut next = vec![0.0; n];
        for v in 0..n {
            if mass[v] == 0.0 {
                continue;
            }
            let share = mass[v] / ball.adj[v].len() as f64;
            for &u in &ball.adj[v] {
                if u == usize::MAX {
                    continue;
                }
                if u == ball.center {
                    returned += share;
                } else {
                    next[u] += share;
                }
            }
        }
        mass = next;
        if mass.iter().sum::<f64>() < 1e-15 {
            break;
        }
    }
    returned
}


fn simulate_return(ball: &BallGraph, cap: u64, stream: &mut KeyedStream) -> bool {
    let mut cur = ball.center;
    for t in 0..cap {
        let nbrs = &ball.adj[cur];
        let next = nbrs[stream.index(nbrs.len())];
        if next == usize::MAX {
            return false;
        }
        if next == ball.center && t > 0 {
            return true;
        }
        if next == ball.center {
            return true; // immediate backtrack on the first step counts
        }
        cur = next;
    }
    false
}

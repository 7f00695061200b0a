//! Coordinate bookkeeping for the box `{0,...,L-1}^d`.
//!
//! Vertices are identified with row-major flattened indices, so lexicographic
//! order on coordinate vectors coincides with index order.

use crate::params::{Boundary, ModelParams, Norm};

/// Row-major flatten; coordinates must lie in `[0, L)`.
#[inline]
pub fn flatten(coords: &[i64], l: i64) -> u64 {
    let mut id: u64 = 0;
    for &c in coords {
        debug_assert!((0..l).contains(&c));
        id = id * l as u64 + c as u64;
    }
    id
}

#[inline]
pub fn unflatten(mut id: u64, d: usize, l: i64, out: &mut [i64]) {
    for i in (0..d).rev() {
        out[i] = (id % l as u64) as i64;
        id /= l as u64;
    }
}

/// Component-wise displacement from `from` to `to`.
///
/// On the torus each component is reduced to the minimal representative in
/// `(-L/2, L/2]`; on the free box it is the plain difference.
pub fn displacement(params: &ModelParams, from: u64, to: u64, out: &mut [i64]) {
    let d = params.d;
    let l = params.l;
    let mut a = [0i64; 3];
    let mut b = [0i64; 3];
    unflatten(from, d, l, &mut a[..d]);
    unflatten(to, d, l, &mut b[..d]);
    for i in 0..d {
        let mut dz = b[i] - a[i];
        if params.boundary == Boundary::Torus {
            dz = dz.rem_euclid(l);
            if 2 * dz > l {
                dz -= l;
            }
        }
        out[i] = dz;
    }
}

/// Norm of an integer displacement vector under the given norm choice.
#[inline]
pub fn vector_norm(dz: &[i64], norm: Norm) -> f64 {
    match norm {
        Norm::L2 => (dz.iter().map(|&z| (z * z) as f64).sum::<f64>()).sqrt(),
        Norm::Linf => dz.iter().map(|&z| z.abs()).max().unwrap_or(0) as f64,
    }
}

/// Distance between two vertices under the environment's edge-law norm.
pub fn distance(params: &ModelParams, u: u64, v: u64) -> f64 {
    let mut dz = [0i64; 3];
    displacement(params, u, v, &mut dz[..params.d]);
    vector_norm(&dz[..params.d], params.norm)
}

/// Nearest-neighbor offsets `(-e_1, +e_1, ..., -e_d, +e_d)` applied to `v`;
/// returns `None` when the step leaves a free box.
pub fn nn_neighbor(params: &ModelParams, v: u64, k: usize) -> Option<u64> {
    let d = params.d;
    let l = params.l;
    let axis = k / 2;
    let dir: i64 = if k % 2 == 0 { -1 } else { 1 };
    let mut c = [0i64; 3];
    unflatten(v, d, l, &mut c[..d]);
    let moved = c[axis] + dir;
    match params.boundary {
        Boundary::Torus => c[axis] = moved.rem_euclid(l),
        Boundary::Free => {
            if !(0..l).contains(&moved) {
                return None;
            }
            c[axis] = moved;
        }
    }
    Some(flatten(&c[..d], l))
}

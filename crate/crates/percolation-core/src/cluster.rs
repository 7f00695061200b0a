//! Connected-component labeling via union-find.

use crate::env::Environment;
use crate::lattice::nn_neighbor;

/// Union-find with path halving and union by size.
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let g = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = g;
            x = g;
        }
        x
    }

    pub fn unite(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Cluster labels plus the size statistics the finite-volume analysis needs.
pub struct ClusterLabeling {
    root: Vec<u32>,
    /// Cluster sizes in nonincreasing order.
    pub sizes: Vec<u64>,
    /// Root label of the largest cluster.
    pub largest_root: u32,
}

impl ClusterLabeling {
    pub fn label(&self, v: u64) -> u32 {
        self.root[v as usize]
    }

    pub fn in_largest(&self, v: u64) -> bool {
        self.root[v as usize] == self.largest_root
    }

    pub fn n1(&self) -> u64 {
        self.sizes.first().copied().unwrap_or(0)
    }

    pub fn n2(&self) -> u64 {
        self.sizes.get(1).copied().unwrap_or(0)
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }
}

/// Labels every vertex by its connected component and reports sorted sizes.
pub fn analyze_clusters(env: &Environment) -> ClusterLabeling {
    let n = env.volume() as usize;
    let mut uf = UnionFind::new(n);
    let params = &env.params;
    for v in 0..n as u64 {
        if params.nn_prob_one {
            // Uniting along +e_i covers every nearest-neighbor edge once.
            for axis in 0..params.d {
                if let Some(u) = nn_neighbor(params, v, 2 * axis + 1) {
                    uf.unite(v as u32, u as u32);
                }
            }
        }
        for &u in env.long_neighbors(v) {
            if (u as u64) > v {
                uf.unite(v as u32, u);
            }
        }
    }
    let mut root = vec![0u32; n];
    let mut counts: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
    for v in 0..n {
        let r = uf.find(v as u32);
        root[v] = r;
        *counts.entry(r).or_insert(0) += 1;
    }
    let mut by_size: Vec<(u64, u32)> = counts.iter().map(|(&r, &c)| (c, r)).collect();
    by_size.sort_unstable_by(|a, b| b.cmp(a));
    let sizes = by_size.iter().map(|&(c, _)| c).collect();
    let largest_root = by_size[0].1;
    ClusterLabeling {
        root,
        sizes,
        largest_root,
    }
}

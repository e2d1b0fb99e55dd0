//! Independent slow oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::HashMap;

use mirnet_core::distance::{DistanceMatrix, DistanceMethod, DistanceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Λ_i by scanning every earlier start position.
pub fn brute_match_lengths(s: &[u32]) -> Vec<usize> {
    let n = s.len();
    (0..n)
        .map(|i| {
            let mut best = 0;
            for j in 0..i {
                let mut k = 0;
                while i + k < n && s[j + k] == s[i + k] {
                    k += 1;
                }
                best = best.max(k);
            }
            best + 1
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Planarity by Kuratowski-subdivision search.

fn pair_bit(n: usize, a: usize, b: usize) -> u64 {
    let (a, b) = (a.min(b), a.max(b));
    // row-major index of (a, b) in the strict upper triangle
    let idx = a * n - a * (a + 1) / 2 + (b - a - 1);
    1u64 << idx
}

struct Kuratowski {
    n: usize,
    pairs: Vec<(usize, usize)>,
    memo: HashMap<u64, bool>,
}

impl Kuratowski {
    fn adjacency(&self, edges: u64) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (k, &(a, b)) in self.pairs.iter().enumerate() {
            if edges >> k & 1 == 1 {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Deletes degree-1 vertices and suppresses degree-2 vertices until neither exists.
    fn reduce(&self, mut edges: u64) -> u64 {
        loop {
            let adj = self.adjacency(edges);
            let Some(v) = (0..self.n).find(|&v| matches!(adj[v].len(), 1 | 2)) else {
                return edges;
            };
            for &w in &adj[v] {
                edges &= !pair_bit(self.n, v, w);
            }
            if let [a, b] = adj[v][..] {
                edges |= pair_bit(self.n, a, b);
            }
        }
    }

    fn is_k33(&self, adj: &[Vec<usize>], verts: &[usize]) -> bool {
        if verts.len() != 6 || verts.iter().any(|&v| adj[v].len() != 3) {
            return false;
        }
        let mut color = vec![None; self.n];
        color[verts[0]] = Some(false);
        let mut stack = vec![verts[0]];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                match color[w] {
                    None => {
                        color[w] = Some(!color[v].unwrap());
                        stack.push(w);
                    }
                    Some(c) if c == color[v].unwrap() => return false,
                    _ => {}
                }
            }
        }
        verts.iter().all(|&v| color[v].is_some())
    }

    fn nonplanar(&mut self, edges: u64) -> bool {
        let edges = self.reduce(edges);
        if let Some(&r) = self.memo.get(&edges) {
            return r;
        }
        let adj = self.adjacency(edges);
        let verts: Vec<usize> = (0..self.n).filter(|&v| !adj[v].is_empty()).collect();
        let m = edges.count_ones() as usize;
        let result = if verts.len() < 5 {
            false
        } else if m > 3 * verts.len() - 6 || self.is_k33(&adj, &verts) {
            true
        } else {
            (0..self.pairs.len())
                .filter(|&k| edges >> k & 1 == 1)
                .any(|k| self.nonplanar(edges & !(1u64 << k)))
        };
        self.memo.insert(edges, result);
        result
    }
}

/// Planarity oracle for graphs of at most 11 vertices.
pub fn kuratowski_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    assert!(n <= 11, "oracle limited to 11 vertices");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut mask = 0u64;
    for &(a, b) in edges {
        if a != b {
            mask |= pair_bit(n, a, b);
        }
    }
    let mut k = Kuratowski {
        n,
        pairs,
        memo: HashMap::new(),
    };
    !k.nonplanar(mask)
}

// ---------------------------------------------------------------------------
// Spanning trees by Prüfer sequence enumeration.

fn prufer_decode(code: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Edge weights, ascending, of the lightest of all `n^(n-2)` labelled
/// spanning trees. Sums are taken in ascending order so that equal trees
/// compare exactly.
pub fn brute_min_spanning_weights(m: &DistanceMatrix) -> Vec<f64> {
    let n = m.len();
    if n == 2 {
        return vec![m.get(0, 1)];
    }
    let mut code = vec![0usize; n - 2];
    let mut best = (f64::INFINITY, Vec::new());
    loop {
        let mut w: Vec<f64> = prufer_decode(&code, n)
            .iter()
            .map(|&(a, b)| m.get(a, b))
            .collect();
        w.sort_by(f64::total_cmp);
        let total: f64 = w.iter().sum();
        if total < best.0 {
            best = (total, w);
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == code.len() {
                return best.1;
            }
            code[pos] += 1;
            if code[pos] < n {
                break;
            }
            code[pos] = 0;
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Random walks.

/// Mean first-passage times estimated by simulating `walks_per_source`
/// walks from every node, each run until all nodes have been visited.
pub fn monte_carlo_passage(
    adj: &[Vec<usize>],
    walks_per_source: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    let n = adj.len();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut totals = vec![0u64; n];
            let mut first = vec![u64::MAX; n];
            for _ in 0..walks_per_source {
                first.fill(u64::MAX);
                first[s] = 0;
                let mut unseen = n - 1;
                let (mut v, mut t) = (s, 0u64);
                while unseen > 0 {
                    let nb = &adj[v];
                    v = nb[rng.random_range(0..nb.len())];
                    t += 1;
                    if first[v] == u64::MAX {
                        first[v] = t;
                        unseen -= 1;
                    }
                }
                for (tot, f) in totals.iter_mut().zip(&first) {
                    *tot += f;
                }
            }
            totals
                .into_iter()
                .map(|x| x as f64 / walks_per_source as f64)
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fixtures.

pub fn random_matrix(n: usize, seed: u64) -> DistanceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.random::<f64>()).collect();
    DistanceMatrix::from_upper(
        (0..n).map(|i| format!("T{i:02}")).collect(),
        DistanceMethod::Correlation,
        DistanceParams::default(),
        &upper,
    )
    .unwrap()
}

pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

/// Random connected graph: a random spanning tree plus extra edges with probability `p`.
pub fn random_connected_graph(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.random_range(0..v), v)).collect();
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    edges
}

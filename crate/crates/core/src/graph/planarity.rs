//! Left-right planarity test (de Fraysseix–Rosenstiehl criterion, in the
//! formulation of Brandes' "The Left-Right Planarity Test").
//!
//! Only decides planarity; no embedding is built.

type EdgeId = usize;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn single(e: EdgeId) -> Self {
        Self {
            low: Some(e),
            high: Some(e),
        }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState<'a> {
    adj: &'a [Vec<(usize, usize)>],
    // oriented edges
    src: Vec<usize>,
    dst: Vec<usize>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting: Vec<usize>,
    out: Vec<Vec<EdgeId>>,
    oriented: Vec<bool>,
    height: Vec<usize>,
    parent_edge: Vec<Option<EdgeId>>,
    // testing phase
    reference: Vec<Option<EdgeId>>,
    lowpt_edge: Vec<Option<EdgeId>>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
}

const UNSEEN: usize = usize::MAX;

impl<'a> LrState<'a> {
    fn new(adj: &'a [Vec<(usize, usize)>], m: usize) -> Self {
        let n = adj.len();
        Self {
            adj,
            src: Vec::with_capacity(m),
            dst: Vec::with_capacity(m),
            lowpt: Vec::with_capacity(m),
            lowpt2: Vec::with_capacity(m),
            nesting: Vec::with_capacity(m),
            out: vec![Vec::new(); n],
            oriented: vec![false; m],
            height: vec![UNSEEN; n],
            parent_edge: vec![None; n],
            reference: Vec::new(),
            lowpt_edge: Vec::new(),
            stack_bottom: Vec::new(),
            stack: Vec::new(),
        }
    }

    fn conflicting(&self, i: &Interval, b: EdgeId) -> bool {
        i.high.is_some_and(|h| self.lowpt[h] > self.lowpt[b])
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        let low = |i: &Interval| i.low.or(i.high).map_or(UNSEEN, |e| self.lowpt[e]);
        if p.left.is_empty() {
            low(&p.right)
        } else if p.right.is_empty() {
            low(&p.left)
        } else {
            low(&p.left).min(low(&p.right))
        }
    }

    fn orient(&mut self, v: usize) {
        let e = self.parent_edge[v];
        for &(w, uid) in &self.adj[v] {
            if self.oriented[uid] {
                continue;
            }
            self.oriented[uid] = true;
            let vw = self.src.len();
            self.src.push(v);
            self.dst.push(w);
            self.lowpt.push(self.height[v]);
            self.lowpt2.push(self.height[v]);
            self.nesting.push(0);
            self.out[v].push(vw);

            if self.height[w] == UNSEEN {
                self.parent_edge[w] = Some(vw);
                self.height[w] = self.height[v] + 1;
                self.orient(w);
            } else {
                self.lowpt[vw] = self.height[w];
            }

            self.nesting[vw] = 2 * self.lowpt[vw] + usize::from(self.lowpt2[vw] < self.height[v]);

            if let Some(e) = e {
                if self.lowpt[vw] < self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                    self.lowpt[e] = self.lowpt[vw];
                } else if self.lowpt[vw] > self.lowpt[e] {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                } else {
                    self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                }
            }
        }
    }

    fn test(&mut self, v: usize) -> bool {
        let e = self.parent_edge[v];
        for idx in 0..self.out[v].len() {
            let ei = self.out[v][idx];
            let w = self.dst[ei];
            self.stack_bottom[ei] = self.stack.len();
            if self.parent_edge[w] == Some(ei) {
                if !self.test(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[ei] = Some(ei);
                self.stack.push(ConflictPair {
                    left: Interval::default(),
                    right: Interval::single(ei),
                });
            }

            if self.lowpt[ei] < self.height[v] {
                // Roots have height 0, so a return edge implies a parent edge.
                let e = e.expect("non-root vertex");
                if idx == 0 {
                    self.lowpt_edge[e] = self.lowpt_edge[ei];
                } else if !self.add_constraints(ei, e) {
                    return false;
                }
            }
        }
        if let Some(e) = e {
            self.remove_back_edges(e);
        }
        true
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair::default();

        // Return edges of ei go to the right.
        while let Some(mut q) = self.stack.pop() {
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let Some(q_low) = q.right.low else {
                return false;
            };
            if self.lowpt[q_low] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else if let Some(pl) = p.right.low {
                    self.reference[pl] = q.right.high;
                }
                p.right.low = q.right.low;
            } else {
                self.reference[q_low] = self.lowpt_edge[e];
            }
            if self.stack.len() <= self.stack_bottom[ei] {
                break;
            }
        }

        // Conflicting return edges of earlier siblings go to the left.
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pl) = p.right.low {
                self.reference[pl] = q.right.high;
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left.high = q.left.high;
            } else if let Some(pl) = p.left.low {
                self.reference[pl] = q.left.high;
            }
            p.left.low = q.left.low;
        }

        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: EdgeId) {
        let u = self.src[e];

        // Drop whole conflict pairs whose return edges all end at u.
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            self.stack.pop();
        }

        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.left.high {
                if self.dst[h] != u {
                    break;
                }
                p.left.high = self.reference[h];
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low.take() {
                    self.reference[l] = p.right.low;
                }
            }
            while let Some(h) = p.right.high {
                if self.dst[h] != u {
                    break;
                }
                p.right.high = self.reference[h];
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low.take() {
                    self.reference[l] = p.left.low;
                }
            }
            self.stack.push(p);
        }

        // The side of e is that of its highest return edge.
        if self.lowpt[e] < self.height[u] {
            if let Some(top) = self.stack.last() {
                let (hl, hr) = (top.left.high, top.right.high);
                self.reference[e] = match (hl, hr) {
                    (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => Some(l),
                    (Some(l), None) => Some(l),
                    _ => hr,
                };
            }
        }
    }
}

/// Decides whether the simple undirected graph on `n` vertices is planar.
/// Duplicate edges and self-loops are ignored.
pub fn is_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut seen = std::collections::HashSet::with_capacity(edges.len());
    let mut m = 0;
    for &(a, b) in edges {
        assert!(
            a < n && b < n,
            "edge ({a}, {b}) out of range for {n} vertices"
        );
        if a == b || !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        adj[a].push((b, m));
        adj[b].push((a, m));
        m += 1;
    }
    if n > 2 && m > 3 * n - 6 {
        return false;
    }

    let mut st = LrState::new(&adj, m);
    let mut roots = Vec::new();
    for v in 0..n {
        if st.height[v] == UNSEEN {
            st.height[v] = 0;
            roots.push(v);
            st.orient(v);
        }
    }

    let m_oriented = st.src.len();
    for v in 0..n {
        let nesting = &st.nesting;
        st.out[v].sort_by_key(|&e| nesting[e]);
    }
    st.reference = vec![None; m_oriented];
    st.lowpt_edge = vec![None; m_oriented];
    st.stack_bottom = vec![0; m_oriented];

    roots.into_iter().all(|r| st.test(r))
}

/// Whether `edges` plus `candidate` is still planar.
pub fn is_planar_with(n: usize, edges: &[(usize, usize)], candidate: (usize, usize)) -> bool {
    let mut all = Vec::with_capacity(edges.len() + 1);
    all.extend_from_slice(edges);
    all.push(candidate);
    is_planar(n, &all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Vec<(usize, usize)> {
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    fn k33() -> Vec<(usize, usize)> {
        (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect()
    }

    #[test]
    fn kuratowski_graphs() {
        assert!(is_planar(4, &complete(4)));
        assert!(!is_planar(5, &complete(5)));
        assert!(!is_planar(6, &k33()));
        let mut k5_minus = complete(5);
        k5_minus.pop();
        assert!(is_planar(5, &k5_minus));
        let mut k33_minus = k33();
        k33_minus.pop();
        assert!(is_planar(6, &k33_minus));
    }

    #[test]
    fn subdivided_k33_is_not_planar() {
        // Split edge (0, 3) through a new vertex 6.
        let mut edges: Vec<_> = k33().into_iter().filter(|&e| e != (0, 3)).collect();
        edges.extend([(0, 6), (6, 3)]);
        assert!(!is_planar(7, &edges));
    }

    #[test]
    fn petersen_is_not_planar() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        assert!(!is_planar(10, &edges));
    }

    #[test]
    fn trivial_and_disconnected() {
        assert!(is_planar(0, &[]));
        assert!(is_planar(1, &[]));
        assert!(is_planar(3, &[(0, 1)]));
        // K4 plus a disjoint K5 is not planar.
        let mut edges = complete(4);
        edges.extend(complete(5).into_iter().map(|(a, b)| (a + 4, b + 4)));
        assert!(!is_planar(9, &edges));
    }

    #[test]
    fn wheel_and_grid() {
        let mut wheel: Vec<_> = (1..=8).map(|i| (0, i)).collect();
        wheel.extend((1..=8).map(|i| (i, i % 8 + 1)));
        assert!(is_planar(9, &wheel));
        let mut grid = Vec::new();
        for r in 0..5 {
            for c in 0..5 {
                let v = r * 5 + c;
                if c < 4 {
                    grid.push((v, v + 1));
                }
                if r < 4 {
                    grid.push((v, v + 5));
                }
            }
        }
        assert!(is_planar(25, &grid));
        assert!(is_planar_with(25, &grid, (0, 24)));
    }
}

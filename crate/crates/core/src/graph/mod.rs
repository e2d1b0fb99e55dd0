//! Filtered graphs built by ordered edge insertion over a distance matrix:
//! the minimal spanning tree (forest constraint) and the planar maximally
//! filtered graph (planarity constraint).

pub mod export;
pub mod planarity;
mod union_find;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distance::{DistanceMatrix, DistanceMethod, DistanceParams};
use crate::error::{Error, Result};
pub use planarity::{is_planar, is_planar_with};
use union_find::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Mst,
    Pmfg,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Mst => "mst",
            GraphKind::Pmfg => "pmfg",
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mst" => Ok(GraphKind::Mst),
            "pmfg" => Ok(GraphKind::Pmfg),
            other => Err(Error::Config(format!("unknown graph kind {other:?}"))),
        }
    }
}

/// An undirected weighted edge between node indices `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilteredGraph {
    pub kind: GraphKind,
    pub nodes: Vec<String>,
    /// Accepted edges in insertion order; the index is the insertion rank.
    pub edges: Vec<Edge>,
    pub source_method: DistanceMethod,
    pub source_params: DistanceParams,
}

impl FilteredGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency().iter().map(Vec::len).collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (u, v) = (a.min(b), a.max(b));
        self.edges.iter().any(|e| e.u == u && e.v == v)
    }
}

/// Every pair `(i, j)`, `i < j`, sorted by ascending distance. Equal
/// distances are ordered by `(min ticker, max ticker)`.
pub fn ordered_edges(m: &DistanceMatrix) -> Vec<Edge> {
    let n = m.len();
    let mut edges: Vec<Edge> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(u, v)| Edge {
            u,
            v,
            weight: m.get(u, v),
        })
        .collect();
    let key = |e: &Edge| {
        let (a, b) = (&m.tickers[e.u], &m.tickers[e.v]);
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    };
    edges.sort_by(|x, y| match x.weight.total_cmp(&y.weight) {
        Ordering::Equal => key(x).cmp(&key(y)),
        other => other,
    });
    edges
}

fn empty_graph(m: &DistanceMatrix, kind: GraphKind) -> FilteredGraph {
    FilteredGraph {
        kind,
        nodes: m.tickers.clone(),
        edges: Vec::new(),
        source_method: m.method,
        source_params: m.params,
    }
}

/// Kruskal insertion over [`ordered_edges`], rejecting edges that close a cycle.
pub fn build_mst(m: &DistanceMatrix) -> Result<FilteredGraph> {
    let n = m.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: n,
            context: "nodes for a spanning tree".into(),
        });
    }
    let mut g = empty_graph(m, GraphKind::Mst);
    let mut uf = UnionFind::new(n);
    for e in ordered_edges(m) {
        if uf.union(e.u, e.v) {
            g.edges.push(e);
            if g.edges.len() == n - 1 {
                break;
            }
        }
    }
    Ok(g)
}

/// Ordered insertion keeping the graph embeddable on a surface of genus at
/// most `genus`. Only the planar case (`genus = 0`) is supported.
pub fn build_genus_filtered(m: &DistanceMatrix, genus: u32) -> Result<FilteredGraph> {
    if genus > 0 {
        return Err(Error::NotImplemented(format!(
            "genus {genus} filtered graphs; only planar (genus 0) graphs are supported"
        )));
    }
    let n = m.len();
    if n < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: n,
            context: "nodes for a planar filtered graph".into(),
        });
    }
    let target = 3 * (n - 2);
    let mut g = empty_graph(m, GraphKind::Pmfg);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(target);
    for e in ordered_edges(m) {
        if is_planar_with(n, &pairs, (e.u, e.v)) {
            pairs.push((e.u, e.v));
            g.edges.push(e);
            if g.edges.len() == target {
                break;
            }
        }
    }
    Ok(g)
}

pub fn build_pmfg(m: &DistanceMatrix) -> Result<FilteredGraph> {
    build_genus_filtered(m, 0)
}

pub fn build(m: &DistanceMatrix, kind: GraphKind) -> Result<FilteredGraph> {
    match kind {
        GraphKind::Mst => build_mst(m),
        GraphKind::Pmfg => build_pmfg(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(tickers: &[&str], upper: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_upper(
            tickers.iter().map(|s| s.to_string()).collect(),
            DistanceMethod::Mir,
            DistanceParams::default(),
            upper,
        )
        .unwrap()
    }

    fn names(m: &DistanceMatrix, edges: &[Edge]) -> Vec<String> {
        edges
            .iter()
            .map(|e| format!("{}{}", m.tickers[e.u], m.tickers[e.v]))
            .collect()
    }

    #[test]
    fn ordering_by_distance() {
        // AB, AC, BC
        let m = matrix(&["A", "B", "C"], &[0.1, 0.5, 0.3]);
        assert_eq!(names(&m, &ordered_edges(&m)), ["AB", "BC", "AC"]);
    }

    #[test]
    fn ties_follow_ticker_order() {
        let m = matrix(&["C", "A", "B"], &[0.2, 0.2, 0.2]);
        // Pairs are (C,A), (C,B), (A,B); lexicographic on sorted labels: AB, AC, BC.
        assert_eq!(names(&m, &ordered_edges(&m)), ["AB", "CA", "CB"]);
    }

    #[test]
    fn mst_of_path_metric() {
        let m = matrix(&["A", "B", "C"], &[1.0, 2.0, 1.0]);
        let t = build_mst(&m).unwrap();
        assert_eq!(names(&m, &t.edges), ["AB", "BC"]);
        assert!(t.is_connected());
    }

    #[test]
    fn pmfg_small_cases() {
        let m = matrix(&["A", "B", "C"], &[0.4, 0.2, 0.9]);
        assert_eq!(build_pmfg(&m).unwrap().edges.len(), 3);
        let m4 = matrix(&["A", "B", "C", "D"], &[0.4, 0.2, 0.9, 0.3, 0.8, 0.1]);
        let p = build_pmfg(&m4).unwrap();
        assert_eq!(p.edges.len(), 6);
    }

    #[test]
    fn positive_genus_is_rejected() {
        let m = matrix(&["A", "B", "C"], &[0.4, 0.2, 0.9]);
        assert!(matches!(
            build_genus_filtered(&m, 1),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("pmfg".parse::<GraphKind>().unwrap(), GraphKind::Pmfg);
        assert!("tree".parse::<GraphKind>().is_err());
    }
}

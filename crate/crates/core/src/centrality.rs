//! Markov centrality: random walks on a filtered graph, their mean
//! first-passage times, and comparisons between centrality vectors.
//!
//! The score of node `v` is `n / Σ_s M[s][v]`, the inverse of the mean
//! first-passage time into `v` averaged over all starting nodes (with
//! `M[v][v] = 0`).

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::distance::pearson;
use crate::error::{Error, Result};
use crate::graph::FilteredGraph;
use crate::ingest::stable_ranks;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityVector {
    pub tickers: Vec<String>,
    pub scores: Vec<f64>,
    /// Label of the network the scores came from, e.g. `mst/mir-a4`.
    pub graph_ref: String,
}

impl CentralityVector {
    pub fn sum(&self) -> f64 {
        self.scores.iter().sum()
    }

    /// Scores rescaled to sum to one.
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.sum();
        self.scores.iter().map(|s| s / total).collect()
    }

    pub fn score_of(&self, ticker: &str) -> Option<f64> {
        self.tickers
            .iter()
            .position(|t| t == ticker)
            .map(|i| self.scores[i])
    }
}

fn strongly_connected(p: &DMatrix<f64>) -> bool {
    let n = p.nrows();
    if n == 0 {
        return true;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let x = if forward { p[(v, w)] } else { p[(w, v)] };
                if x > 0.0 && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Row-stochastic transition matrix of a random walk on `g`.
///
/// Unweighted: uniform over neighbours. Weighted: proportional to the
/// similarity `1 − distance` of each incident edge (negative similarities
/// count as zero).
pub fn transition_matrix(g: &FilteredGraph, weighted: bool) -> Result<DMatrix<f64>> {
    let n = g.node_count();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut p = DMatrix::zeros(n, n);
    for e in &g.edges {
        let w = if weighted {
            (1.0 - e.weight).max(0.0)
        } else {
            1.0
        };
        p[(e.u, e.v)] += w;
        p[(e.v, e.u)] += w;
    }
    for i in 0..n {
        let total: f64 = p.row(i).sum();
        if total <= 0.0 {
            return Err(Error::Numerical(format!(
                "node {} has zero total similarity to its neighbours",
                g.nodes[i]
            )));
        }
        p.row_mut(i).scale_mut(1.0 / total);
    }
    if weighted && !strongly_connected(&p) {
        return Err(Error::Disconnected);
    }
    Ok(p)
}

/// Mean first-passage times: `M[v][v] = 0` and
/// `M[s][v] = 1 + Σ_u P[s][u]·M[u][v]` for `s ≠ v`, one dense solve per target.
pub fn mean_first_passage(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::Numerical(format!(
            "transition matrix is {}x{}",
            n,
            p.ncols()
        )));
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if !strongly_connected(p) {
        return Err(Error::Disconnected);
    }
    if n == 1 {
        return Ok(DMatrix::zeros(1, 1));
    }

    let columns = (0..n)
        .into_par_iter()
        .map(|v| {
            let others: Vec<usize> = (0..n).filter(|&s| s != v).collect();
            let k = others.len();
            let a = DMatrix::from_fn(k, k, |r, c| {
                let delta = if r == c { 1.0 } else { 0.0 };
                delta - p[(others[r], others[c])]
            });
            let lu = a.lu();
            let x = lu.solve(&DVector::from_element(k, 1.0)).ok_or_else(|| {
                let diag = lu.u().diagonal().map(f64::abs);
                Error::Numerical(format!(
                    "singular first-passage system for target {v}: |U_ii| in [{:e}, {:e}]",
                    diag.min(),
                    diag.max()
                ))
            })?;
            let mut col = vec![0.0; n];
            for (r, &s) in others.iter().enumerate() {
                col[s] = x[r];
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DMatrix::from_fn(n, n, |s, v| columns[v][s]))
}

/// Stationary distribution `π` with `πP = π`, `Σπ = 1`.
pub fn stationary_distribution(p: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = p.nrows();
    let mut a = DMatrix::identity(n, n) - p.transpose();
    for c in 0..n {
        a[(n - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular stationary system".into()))
}

/// Expected return time to each node: `1 + Σ_u P[v][u]·M[u][v]`.
pub fn return_times(p: &DMatrix<f64>, m: &DMatrix<f64>) -> Vec<f64> {
    (0..p.nrows())
        .map(|v| 1.0 + (0..p.nrows()).map(|u| p[(v, u)] * m[(u, v)]).sum::<f64>())
        .collect()
}

pub fn markov_centrality(g: &FilteredGraph, weighted: bool) -> Result<CentralityVector> {
    let p = transition_matrix(g, weighted)?;
    let m = mean_first_passage(&p)?;
    let n = g.node_count() as f64;
    let scores = m.column_iter().map(|col| n / col.sum()).collect();
    Ok(CentralityVector {
        tickers: g.nodes.clone(),
        scores,
        graph_ref: format!("{}/{}", g.kind, g.source_method),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralityComparison {
    /// `None` when either vector is constant.
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub n: usize,
}

/// Average ranks (1-based), ties sharing their mean rank.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let order = {
        let ranks = stable_ranks(x);
        let mut order = vec![0; x.len()];
        for (i, r) in ranks.into_iter().enumerate() {
            order[r] = i;
        }
        order
    };
    let mut out = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && x[order[end + 1]] == x[order[start]] {
            end += 1;
        }
        let mean = (start + end) as f64 / 2.0 + 1.0;
        for &i in &order[start..=end] {
            out[i] = mean;
        }
        start = end + 1;
    }
    out
}

/// Pearson and Spearman correlation of two centrality vectors over the same
/// tickers; `b` is aligned to `a`'s ticker order.
pub fn compare_centralities(
    a: &CentralityVector,
    b: &CentralityVector,
) -> Result<CentralityComparison> {
    if a.tickers.len() != b.tickers.len() {
        return Err(Error::TickerMismatch(format!(
            "{} has {} nodes, {} has {}",
            a.graph_ref,
            a.tickers.len(),
            b.graph_ref,
            b.tickers.len()
        )));
    }
    let aligned = a
        .tickers
        .iter()
        .map(|t| {
            b.score_of(t)
                .ok_or_else(|| Error::TickerMismatch(format!("{t} missing from {}", b.graph_ref)))
        })
        .collect::<Result<Vec<_>>>()?;
    let pearson_or_none = |x: &[f64], y: &[f64]| match pearson(x, y) {
        Ok(r) => Ok(Some(r)),
        Err(Error::UndefinedCorrelation) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(CentralityComparison {
        pearson: pearson_or_none(&a.scores, &aligned)?,
        spearman: pearson_or_none(&average_ranks(&a.scores), &average_ranks(&aligned))?,
        n: aligned.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{DistanceMethod, DistanceParams};
    use crate::graph::{Edge, GraphKind};

    pub(crate) fn graph(n: usize, edges: &[(usize, usize)]) -> FilteredGraph {
        FilteredGraph {
            kind: GraphKind::Mst,
            nodes: (0..n).map(|i| format!("N{i}")).collect(),
            edges: edges
                .iter()
                .map(|&(u, v)| Edge {
                    u: u.min(v),
                    v: u.max(v),
                    weight: 0.5,
                })
                .collect(),
            source_method: DistanceMethod::Correlation,
            source_params: DistanceParams::default(),
        }
    }

    #[test]
    fn path_transitions() {
        let p = transition_matrix(&graph(3, &[(0, 1), (1, 2)]), false).unwrap();
        assert_eq!(p[(1, 0)], 0.5);
        assert_eq!(p[(1, 2)], 0.5);
        assert_eq!(p[(0, 1)], 1.0);
        assert_eq!(p[(2, 1)], 1.0);
    }

    #[test]
    fn triangle_rows_are_stochastic() {
        let p = transition_matrix(&graph(3, &[(0, 1), (1, 2), (0, 2)]), false).unwrap();
        for i in 0..3 {
            assert!((p.row(i).sum() - 1.0).abs() < 1e-15);
            for j in 0..3 {
                assert_eq!(p[(i, j)], if i == j { 0.0 } else { 0.5 });
            }
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        assert!(matches!(
            transition_matrix(&graph(3, &[(0, 1)]), false),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn two_node_passage() {
        let p = transition_matrix(&graph(2, &[(0, 1)]), false).unwrap();
        let m = mean_first_passage(&p).unwrap();
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 0)], 1.0);
    }

    #[test]
    fn path_passage_and_scores() {
        // M[B][A] = 1 + M[C][A]/2 and M[C][A] = 1 + M[B][A] give M[B][A] = 3, M[C][A] = 4.
        let g = graph(3, &[(0, 1), (1, 2)]);
        let m = mean_first_passage(&transition_matrix(&g, false).unwrap()).unwrap();
        assert!((m[(0, 2)] - 4.0).abs() < 1e-12);
        assert!((m[(1, 0)] - 3.0).abs() < 1e-12);
        let c = markov_centrality(&g, false).unwrap();
        assert!((c.scores[0] - 3.0 / 7.0).abs() < 1e-12);
        assert!((c.scores[1] - 1.5).abs() < 1e-12);
        assert!(c.scores[1] > c.scores[0]);
        assert!((c.scores[0] - c.scores[2]).abs() < 1e-12);
    }

    #[test]
    fn weighted_walk_uses_similarity() {
        let mut g = graph(3, &[(0, 1), (1, 2)]);
        g.edges[0].weight = 0.2;
        g.edges[1].weight = 0.6;
        let p = transition_matrix(&g, true).unwrap();
        assert!((p[(1, 0)] - 2.0 / 3.0).abs() < 1e-12);
        g.edges[1].weight = 1.0;
        assert!(transition_matrix(&g, true).is_err());
    }

    #[test]
    fn compare_alignment_and_extremes() {
        let a = CentralityVector {
            tickers: vec!["A".into(), "B".into(), "C".into()],
            scores: vec![1.0, 2.0, 3.0],
            graph_ref: "a".into(),
        };
        let same = compare_centralities(&a, &a).unwrap();
        assert!((same.pearson.unwrap() - 1.0).abs() < 1e-12);
        let reversed = CentralityVector {
            tickers: vec!["C".into(), "A".into(), "B".into()],
            scores: vec![1.0, 3.0, 2.0],
            graph_ref: "b".into(),
        };
        let r = compare_centralities(&a, &reversed).unwrap();
        assert!((r.pearson.unwrap() + 1.0).abs() < 1e-12);
        assert!((r.spearman.unwrap() + 1.0).abs() < 1e-12);

        let other = CentralityVector {
            tickers: vec!["A".into(), "B".into(), "Z".into()],
            ..a.clone()
        };
        assert!(matches!(
            compare_centralities(&a, &other),
            Err(Error::TickerMismatch(_))
        ));
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            average_ranks(&[3.0, 1.0, 3.0, 2.0]),
            vec![3.5, 1.0, 3.5, 2.0]
        );
    }
}

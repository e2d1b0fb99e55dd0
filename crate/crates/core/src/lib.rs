//! Hierarchical dependency networks over financial time series.
//!
//! Prices are turned into log returns and, for the information-theoretic
//! route, into equal-frequency symbol sequences. Pairwise distances come
//! either from Pearson correlation or from the mutual information rate,
//! estimated with Lempel-Ziv match lengths on the joint symbol sequence.
//! Distance matrices are filtered into minimal spanning trees and planar
//! maximally filtered graphs, whose nodes are ranked by Markov centrality.

pub mod centrality;
pub mod distance;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod lz;
pub mod pipeline;
pub mod synth;

pub use centrality::{
    compare_centralities, markov_centrality, mean_first_passage, transition_matrix,
    CentralityComparison, CentralityVector,
};
pub use distance::{
    build_matrix, build_symbol_matrix, corr_distance, mir_distance, mir_prime_distance, pearson,
    CorrMetric, DistanceMatrix, DistanceMethod, DistanceParams,
};
pub use error::{Error, Result};
pub use graph::{build_mst, build_pmfg, ordered_edges, Edge, FilteredGraph, GraphKind};
pub use ingest::{
    discretize, load_price_table, log_returns, PriceSeries, ReturnSeries, SymbolSequence, TableSpec,
};
pub use lz::{
    entropy_rate, join, joint_entropy_rate, match_lengths, mutual_lz, JointSequence, LzConfig,
    LzEstimate,
};
pub use pipeline::{entropy_diagnose, run_pipeline, AnalysisConfig, Manifest};

//! End-to-end analysis: load prices, build distance matrices for every
//! requested (method, alphabet) variant, filter them into MST/PMFG networks,
//! score nodes by Markov centrality and compare each MIR network with the
//! correlation network of the same kind.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{
    compare_centralities, markov_centrality, CentralityComparison, CentralityVector,
};
use crate::distance::{build_matrix, CorrMetric, DistanceMatrix, DistanceMethod, DistanceParams};
use crate::error::{Error, Result};
use crate::graph::{self, export, FilteredGraph, GraphKind};
use crate::ingest::{discretize, load_price_table, log_returns, ReturnSeries, TableSpec};
use crate::lz::{self, LzConfig, DEFAULT_MIN_LEN};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub table: TableSpec,
    pub alphabets: Vec<u32>,
    pub methods: Vec<DistanceMethod>,
    pub kinds: Vec<GraphKind>,
    pub corr_metric: CorrMetric,
    pub weighted_walk: bool,
    pub min_len: usize,
    pub allow_short: bool,
    pub degenerate_as_zero: bool,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            table: TableSpec::default(),
            alphabets: vec![4, 10],
            methods: vec![DistanceMethod::Correlation, DistanceMethod::Mir],
            kinds: vec![GraphKind::Mst, GraphKind::Pmfg],
            corr_metric: CorrMetric::default(),
            weighted_walk: false,
            min_len: DEFAULT_MIN_LEN,
            allow_short: false,
            degenerate_as_zero: false,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.kinds.is_empty() {
            return Err(Error::Config(
                "at least one method and one graph kind required".into(),
            ));
        }
        if self.methods.iter().any(|m| m.uses_symbols()) && self.alphabets.is_empty() {
            return Err(Error::Config(
                "MIR methods need at least one alphabet size".into(),
            ));
        }
        if let Some(a) = self.alphabets.iter().find(|&&a| a < 2) {
            return Err(Error::Config(format!("alphabet size {a} is below 2")));
        }
        Ok(())
    }

    pub fn lz(&self) -> LzConfig {
        LzConfig {
            min_len: self.min_len,
            allow_short: self.allow_short,
        }
    }

    /// Distance variants in output order; correlation ignores the alphabet.
    pub fn variants(&self) -> Vec<Variant> {
        let mut out = Vec::new();
        for &method in &self.methods {
            if method.uses_symbols() {
                out.extend(self.alphabets.iter().map(|&a| Variant {
                    method,
                    alphabet: Some(a),
                }));
            } else {
                out.push(Variant {
                    method,
                    alphabet: None,
                });
            }
        }
        out.dedup();
        out
    }

    /// Every (variant, kind) combination with its artifact paths, relative to
    /// the output directory.
    pub fn combinations(&self) -> Vec<(Variant, GraphKind, Vec<PathBuf>)> {
        self.variants()
            .into_iter()
            .flat_map(|v| self.kinds.iter().map(move |&k| (v, k, v.artifact_paths(k))))
            .collect()
    }

    fn params_for(&self, v: Variant) -> DistanceParams {
        DistanceParams {
            alphabet_size: v.alphabet.unwrap_or(0),
            corr_metric: self.corr_metric,
            lz: self.lz(),
            degenerate_as_zero: self.degenerate_as_zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub method: DistanceMethod,
    pub alphabet: Option<u32>,
}

impl Variant {
    pub fn tag(&self) -> String {
        match self.alphabet {
            Some(a) => format!("{}-a{a}", self.method),
            None => self.method.to_string(),
        }
    }

    fn matrix_paths(&self) -> [PathBuf; 2] {
        let dir = PathBuf::from(self.tag());
        [dir.join("distance.csv"), dir.join("distance.json")]
    }

    pub fn artifact_paths(&self, kind: GraphKind) -> Vec<PathBuf> {
        let dir = PathBuf::from(self.tag());
        ["graphml", "dot", "json"]
            .iter()
            .map(|ext| dir.join(format!("{kind}.{ext}")))
            .chain(std::iter::once(dir.join(format!("{kind}_centrality.csv"))))
            .collect()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombinationRecord {
    pub variant: String,
    pub method: DistanceMethod,
    pub alphabet: Option<u32>,
    pub kind: GraphKind,
    pub status: Status,
    pub error: Option<String>,
    pub edges: Option<usize>,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRecord {
    pub variant: String,
    pub status: Status,
    pub error: Option<String>,
    pub negative_mir_pairs: usize,
    pub total_pairs: usize,
    pub triangle_violations: usize,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub kind: GraphKind,
    pub baseline: String,
    pub variant: String,
    pub alphabet: Option<u32>,
    #[serde(flatten)]
    pub stats: CentralityComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub input: PathBuf,
    pub instruments: Vec<String>,
    pub observations: usize,
    pub matrices: Vec<MatrixRecord>,
    pub combinations: Vec<CombinationRecord>,
    pub centrality_tables: Vec<PathBuf>,
    pub comparison: Option<PathBuf>,
    pub comparisons: Vec<ComparisonEntry>,
    pub notes: Vec<String>,
}

impl Manifest {
    pub fn all_ok(&self) -> bool {
        self.matrices.iter().all(|m| m.status == Status::Ok)
            && self.combinations.iter().all(|c| c.status == Status::Ok)
    }
}

/// Slack used when counting empirical triangle-inequality violations.
pub const TRIANGLE_SLACK: f64 = 0.02;

struct KindOutcome {
    kind: GraphKind,
    result: Result<(FilteredGraph, CentralityVector)>,
}

struct VariantOutcome {
    variant: Variant,
    matrix: Result<DistanceMatrix>,
    kinds: Vec<KindOutcome>,
}

fn analyse_variant(
    cfg: &AnalysisConfig,
    returns: &[ReturnSeries],
    variant: Variant,
) -> VariantOutcome {
    let matrix = build_matrix(returns, variant.method, &cfg.params_for(variant));
    let kinds = match &matrix {
        Ok(m) => cfg
            .kinds
            .par_iter()
            .map(|&kind| KindOutcome {
                kind,
                result: graph::build(m, kind).and_then(|g| {
                    let mut c = markov_centrality(&g, cfg.weighted_walk)?;
                    c.graph_ref = format!("{kind}/{variant}");
                    Ok((g, c))
                }),
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    VariantOutcome {
        variant,
        matrix,
        kinds,
    }
}

fn write_file(dir: &Path, rel: &Path, contents: &[u8]) -> Result<()> {
    let path = dir.join(rel);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    fs::write(&path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Moves staged files into the output directory, one rename per file.
fn publish(staging: &Path, out: &Path, files: &[PathBuf]) -> Result<()> {
    for rel in files {
        let dest = out.join(rel);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
        fs::rename(staging.join(rel), &dest)
            .map_err(|e| Error::io(format!("moving {} into place", dest.display()), e))?;
    }
    Ok(())
}

fn centrality_csv(rows: &[(String, &CentralityVector)]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("writing centrality table: {e}"));
    let mut header = vec!["vertex".to_owned()];
    for (label, _) in rows {
        header.push(label.clone());
        header.push(format!("{label}_normalized"));
    }
    w.write_record(&header).map_err(csv_err)?;
    let Some((_, first)) = rows.first() else {
        return w.into_inner().map_err(|e| Error::Config(e.to_string()));
    };
    let normalized: Vec<Vec<f64>> = rows.iter().map(|(_, c)| c.normalized()).collect();
    for (i, ticker) in first.tickers.iter().enumerate() {
        let mut rec = vec![ticker.clone()];
        for ((_, c), norm) in rows.iter().zip(&normalized) {
            let j = c.tickers.iter().position(|t| t == ticker).unwrap_or(i);
            rec.push(c.scores[j].to_string());
            rec.push(norm[j].to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Config(e.to_string()))
}

/// Staged matrix files, then graph files per kind.
type StagedFiles = (Vec<PathBuf>, Vec<(GraphKind, Vec<PathBuf>)>);

fn stage_variant(
    staging: &Path,
    outcome: &VariantOutcome,
    matrix: &DistanceMatrix,
) -> Result<StagedFiles> {
    let v = outcome.variant;
    let [csv_path, json_path] = v.matrix_paths();
    let mut buf = Vec::new();
    matrix.write_delimited(&mut buf, b',')?;
    write_file(staging, &csv_path, &buf)?;
    let report = serde_json::to_vec_pretty(&matrix.report()).expect("matrix report serializes");
    write_file(staging, &json_path, &report)?;

    let mut per_kind = Vec::new();
    for k in &outcome.kinds {
        let Ok((g, c)) = &k.result else { continue };
        let paths = v.artifact_paths(k.kind);
        write_file(staging, &paths[0], export::to_graphml(g).as_bytes())?;
        write_file(staging, &paths[1], export::to_dot(g).as_bytes())?;
        write_file(staging, &paths[2], export::to_json(g).as_bytes())?;
        write_file(staging, &paths[3], &centrality_csv(&[(v.tag(), c)])?)?;
        per_kind.push((k.kind, paths));
    }
    Ok((vec![csv_path, json_path], per_kind))
}

/// Runs every configured combination. Input and configuration errors abort
/// before anything is written; failures inside one combination are recorded
/// in the manifest and the remaining combinations still run.
pub fn run_pipeline(cfg: &AnalysisConfig) -> Result<Manifest> {
    cfg.validate()?;
    let prices = load_price_table(&cfg.input, &cfg.table)?;
    let returns: Vec<ReturnSeries> = prices.iter().map(log_returns).collect();
    let observations = returns[0].len();

    let outcomes: Vec<VariantOutcome> = cfg
        .variants()
        .into_par_iter()
        .map(|v| analyse_variant(cfg, &returns, v))
        .collect();

    let out = &cfg.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(format!("creating {}", out.display()), e))?;
    let staging = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(out)
        .map_err(|e| Error::io("creating staging directory", e))?;

    let mut manifest = Manifest {
        input: cfg.input.clone(),
        instruments: returns.iter().map(|r| r.ticker.clone()).collect(),
        observations,
        matrices: Vec::new(),
        combinations: Vec::new(),
        centrality_tables: Vec::new(),
        comparison: None,
        comparisons: Vec::new(),
        notes: Vec::new(),
    };

    for outcome in &outcomes {
        let v = outcome.variant;
        let matrix = match &outcome.matrix {
            Ok(m) => m,
            Err(e) => {
                log::error!("{v}: {e}");
                manifest.matrices.push(MatrixRecord {
                    variant: v.tag(),
                    status: Status::Failed,
                    error: Some(e.to_string()),
                    negative_mir_pairs: 0,
                    total_pairs: 0,
                    triangle_violations: 0,
                    artifacts: Vec::new(),
                });
                for &kind in &cfg.kinds {
                    manifest.combinations.push(CombinationRecord {
                        variant: v.tag(),
                        method: v.method,
                        alphabet: v.alphabet,
                        kind,
                        status: Status::Failed,
                        error: Some(format!("distance matrix: {e}")),
                        edges: None,
                        artifacts: Vec::new(),
                    });
                }
                continue;
            }
        };

        let (matrix_files, kind_files) = stage_variant(staging.path(), outcome, matrix)?;
        publish(staging.path(), out, &matrix_files)?;
        manifest.matrices.push(MatrixRecord {
            variant: v.tag(),
            status: Status::Ok,
            error: None,
            negative_mir_pairs: matrix.clamp.negative_pairs,
            total_pairs: matrix.clamp.total_pairs,
            triangle_violations: crate::distance::triangle_violations(matrix, TRIANGLE_SLACK).len(),
            artifacts: matrix_files,
        });

        for k in &outcome.kinds {
            let mut record = CombinationRecord {
                variant: v.tag(),
                method: v.method,
                alphabet: v.alphabet,
                kind: k.kind,
                status: Status::Ok,
                error: None,
                edges: None,
                artifacts: Vec::new(),
            };
            match &k.result {
                Ok((g, _)) => {
                    let files = &kind_files
                        .iter()
                        .find(|(kind, _)| *kind == k.kind)
                        .unwrap()
                        .1;
                    publish(staging.path(), out, files)?;
                    record.edges = Some(g.edges.len());
                    record.artifacts = files.clone();
                }
                Err(e) => {
                    log::error!("{v}/{}: {e}", k.kind);
                    record.status = Status::Failed;
                    record.error = Some(e.to_string());
                }
            }
            manifest.combinations.push(record);
        }
    }

    // Per-kind centrality tables, one column pair per variant.
    for &kind in &cfg.kinds {
        let rows: Vec<(String, &CentralityVector)> = outcomes
            .iter()
            .filter_map(|o| {
                o.kinds
                    .iter()
                    .find(|k| k.kind == kind)
                    .and_then(|k| k.result.as_ref().ok())
                    .map(|(_, c)| (o.variant.tag(), c))
            })
            .collect();
        if rows.is_empty() {
            continue;
        }
        let rel = PathBuf::from(format!("centrality_{kind}.csv"));
        write_file(staging.path(), &rel, &centrality_csv(&rows)?)?;
        publish(staging.path(), out, std::slice::from_ref(&rel))?;
        manifest.centrality_tables.push(rel);
    }

    compare_variants(cfg, &outcomes, &mut manifest);
    if !manifest.comparisons.is_empty() {
        let rel = PathBuf::from("comparison.json");
        let body = serde_json::to_vec_pretty(&manifest.comparisons).expect("comparison serializes");
        write_file(staging.path(), &rel, &body)?;
        publish(staging.path(), out, std::slice::from_ref(&rel))?;
        manifest.comparison = Some(rel);
    }

    let body = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_file(staging.path(), Path::new(MANIFEST_FILE), &body)?;
    publish(staging.path(), out, &[PathBuf::from(MANIFEST_FILE)])?;
    Ok(manifest)
}

fn compare_variants(cfg: &AnalysisConfig, outcomes: &[VariantOutcome], manifest: &mut Manifest) {
    let baseline = outcomes
        .iter()
        .find(|o| o.variant.method == DistanceMethod::Correlation);
    let Some(baseline) = baseline else {
        manifest
            .notes
            .push("no comparison report: correlation method not requested".into());
        return;
    };
    if outcomes.len() < 2 {
        manifest
            .notes
            .push("no comparison report: only one distance variant requested".into());
        return;
    }
    for &kind in &cfg.kinds {
        let base = baseline
            .kinds
            .iter()
            .find(|k| k.kind == kind)
            .and_then(|k| k.result.as_ref().ok());
        let Some((_, base_c)) = base else {
            manifest.notes.push(format!(
                "no {kind} comparison: correlation network unavailable"
            ));
            continue;
        };
        for o in outcomes.iter().filter(|o| o.variant.method.uses_symbols()) {
            let Some((_, c)) = o
                .kinds
                .iter()
                .find(|k| k.kind == kind)
                .and_then(|k| k.result.as_ref().ok())
            else {
                manifest.notes.push(format!(
                    "no {kind} comparison for {}: network unavailable",
                    o.variant
                ));
                continue;
            };
            match compare_centralities(base_c, c) {
                Ok(stats) => manifest.comparisons.push(ComparisonEntry {
                    kind,
                    baseline: baseline.variant.tag(),
                    variant: o.variant.tag(),
                    alphabet: o.variant.alphabet,
                    stats,
                }),
                Err(e) => manifest
                    .notes
                    .push(format!("{kind} comparison for {} failed: {e}", o.variant)),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyLine {
    pub alphabet: u32,
    pub value: f64,
    pub max_rate: f64,
    pub overshoots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub ticker: String,
    pub observations: usize,
    pub estimates: Vec<EntropyLine>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl fmt::Display for EntropyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ticker: {}", self.ticker)?;
        writeln!(f, "observations: {}", self.observations)?;
        for e in &self.estimates {
            writeln!(
                f,
                "alphabet {:>3}: {:.4} bits/symbol (max {:.4}){}",
                e.alphabet,
                e.value,
                e.max_rate,
                if e.overshoots { " [overshoot]" } else { "" }
            )?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

/// Entropy-rate diagnostics for one instrument at every configured alphabet.
/// Short series are estimated anyway, with a warning.
pub fn entropy_diagnose(cfg: &AnalysisConfig, ticker: &str) -> Result<EntropyReport> {
    let prices = load_price_table(&cfg.input, &cfg.table)?;
    let Some(series) = prices.iter().find(|p| p.ticker() == ticker) else {
        return Err(Error::UnknownTicker {
            ticker: ticker.to_owned(),
            available: prices.iter().map(|p| p.ticker().to_owned()).collect(),
        });
    };
    diagnose_returns(cfg, &log_returns(series))
}

pub fn diagnose_returns(cfg: &AnalysisConfig, returns: &ReturnSeries) -> Result<EntropyReport> {
    let n = returns.len();
    let mut report = EntropyReport {
        ticker: returns.ticker.clone(),
        observations: n,
        estimates: Vec::new(),
        warnings: Vec::new(),
        notes: Vec::new(),
    };
    if n < cfg.min_len {
        report.warnings.push(format!(
            "only {n} observations; estimates under {} points are unreliable",
            cfg.min_len
        ));
    }
    if returns.returns.windows(2).all(|w| w[0] == w[1]) {
        report.notes.push(
            "log returns are constant; symbols only encode position and the rate is degenerate"
                .into(),
        );
    }
    let lenient = LzConfig {
        min_len: cfg.min_len,
        allow_short: true,
    };
    for &alphabet in &cfg.alphabets {
        if crate::ingest::exceeds_bin_guidance(n, alphabet) {
            report.warnings.push(format!(
                "alphabet {alphabet} exceeds the square root of the sample size"
            ));
        }
        let symbols = discretize(returns, alphabet)?;
        let est = lz::entropy_rate(&symbols, &lenient)?;
        report.estimates.push(EntropyLine {
            alphabet,
            value: est.value,
            max_rate: (alphabet as f64).log2(),
            overshoots: est.overshoots(),
        });
    }
    Ok(report)
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomically(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::io(format!("creating temporary file in {}", dir.display()), e))?;
    tmp.write_all(contents)
        .map_err(|e| Error::io("writing temporary file", e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(format!("moving {} into place", path.display()), e.error))?;
    Ok(())
}

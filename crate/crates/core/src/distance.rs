//! Pairwise distances (correlation baseline and MIR-based) and distance matrices.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{discretize, ReturnSeries, SymbolSequence};
use crate::lz::{self, LzConfig, MutualLz};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Correlation,
    Mir,
    MirPrime,
}

impl DistanceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMethod::Correlation => "correlation",
            DistanceMethod::Mir => "mir",
            DistanceMethod::MirPrime => "mir_prime",
        }
    }

    pub fn uses_symbols(self) -> bool {
        !matches!(self, DistanceMethod::Correlation)
    }
}

impl fmt::Display for DistanceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DistanceMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correlation" | "corr" => Ok(DistanceMethod::Correlation),
            "mir" => Ok(DistanceMethod::Mir),
            "mir_prime" | "mir-prime" => Ok(DistanceMethod::MirPrime),
            other => Err(Error::Config(format!("unknown distance method {other:?}"))),
        }
    }
}

/// How a correlation coefficient becomes a distance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrMetric {
    /// `1 − ρ²`.
    #[default]
    OneMinusSquared,
    /// `sqrt(2(1 − ρ))`, ranging over `[0, 2]`.
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistanceParams {
    /// Alphabet for the MIR methods; ignored by `Correlation`.
    pub alphabet_size: u32,
    pub corr_metric: CorrMetric,
    pub lz: LzConfig,
    /// Map pairs of constant sequences to distance 0 instead of failing.
    pub degenerate_as_zero: bool,
}

impl Default for DistanceParams {
    fn default() -> Self {
        Self {
            alphabet_size: 4,
            corr_metric: CorrMetric::default(),
            lz: LzConfig::default(),
            degenerate_as_zero: false,
        }
    }
}

pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Alignment {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: n,
            context: "observations for correlation".into(),
        });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn corr_metric_value(rho: f64, metric: CorrMetric) -> f64 {
    match metric {
        CorrMetric::OneMinusSquared => 1.0 - rho * rho,
        CorrMetric::Sqrt => (2.0 * (1.0 - rho)).max(0.0).sqrt(),
    }
}

pub fn corr_distance(x: &[f64], y: &[f64], metric: CorrMetric) -> Result<f64> {
    pearson(x, y).map(|rho| corr_metric_value(rho, metric))
}

/// Both MIR distances derived from one set of rate estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MirDistances {
    /// `MIR` clamped at zero.
    pub mir: f64,
    /// Whether the raw mutual LZ value was negative.
    pub clamped: bool,
    /// `D = (HR(X,Y) − MIR) / HR(X,Y)`.
    pub d: f64,
    /// `D' = 1 − MIR / max(HR(X), HR(Y))`.
    pub d_prime: f64,
}

impl MirDistances {
    pub fn from_rates(m: &MutualLz) -> Self {
        let raw = m.value();
        let mir = raw.max(0.0);
        let d = ((m.hr_xy - mir) / m.hr_xy).clamp(0.0, 1.0);
        let d_prime = (1.0 - mir / m.hr_x.max(m.hr_y)).clamp(0.0, 1.0);
        Self {
            mir,
            clamped: raw < 0.0,
            d,
            d_prime,
        }
    }
}

fn mir_distances(
    x: &SymbolSequence,
    y: &SymbolSequence,
    params: &DistanceParams,
) -> Result<Option<MirDistances>> {
    if x.len() != y.len() {
        return Err(Error::Alignment {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.is_constant() && y.is_constant() {
        return if params.degenerate_as_zero {
            Ok(None)
        } else {
            Err(Error::DegeneratePair)
        };
    }
    let rates = lz::mutual_lz_parts(x, y, &params.lz)?;
    Ok(Some(MirDistances::from_rates(&rates)))
}

/// Normalized MIR distance `D`, in `[0, 1]`.
pub fn mir_distance(
    x: &SymbolSequence,
    y: &SymbolSequence,
    params: &DistanceParams,
) -> Result<f64> {
    Ok(mir_distances(x, y, params)?.map_or(0.0, |m| m.d))
}

/// The sharper variant `D' ≤ D`, in `[0, 1]`.
pub fn mir_prime_distance(
    x: &SymbolSequence,
    y: &SymbolSequence,
    params: &DistanceParams,
) -> Result<f64> {
    Ok(mir_distances(x, y, params)?.map_or(0.0, |m| m.d_prime))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClampStats {
    /// Pairs whose raw mutual LZ value was negative before clamping.
    pub negative_pairs: usize,
    pub total_pairs: usize,
}

impl ClampStats {
    pub fn fraction(&self) -> f64 {
        if self.total_pairs == 0 {
            0.0
        } else {
            self.negative_pairs as f64 / self.total_pairs as f64
        }
    }
}

/// Symmetric `n × n` distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceMatrix {
    pub tickers: Vec<String>,
    pub method: DistanceMethod,
    pub params: DistanceParams,
    pub clamp: ClampStats,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from its strict upper triangle, row-major:
    /// `(0,1), (0,2), .., (1,2), ..`.
    pub fn from_upper(
        tickers: Vec<String>,
        method: DistanceMethod,
        params: DistanceParams,
        upper: &[f64],
    ) -> Result<Self> {
        let n = tickers.len();
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Alignment {
                left: upper.len(),
                right: n * n.saturating_sub(1) / 2,
            });
        }
        if let Some(v) = upper.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Config(format!("invalid distance {v}")));
        }
        let mut values = vec![0.0; n * n];
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = *it.next().unwrap();
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self {
            tickers,
            method,
            params,
            clamp: ClampStats::default(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.tickers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tickers.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Structured export: method, parameters, clamp statistics and the full matrix.
    pub fn report(&self) -> MatrixReport<'_> {
        MatrixReport {
            tickers: &self.tickers,
            method: self.method,
            alphabet_size: self
                .method
                .uses_symbols()
                .then_some(self.params.alphabet_size),
            corr_metric: (!self.method.uses_symbols()).then_some(self.params.corr_metric),
            negative_mir_pairs: self.clamp.negative_pairs,
            total_pairs: self.clamp.total_pairs,
            negative_mir_fraction: self.clamp.fraction(),
            values: (0..self.len()).map(|i| self.row(i)).collect(),
        }
    }

    /// Writes the matrix as a delimited table with tickers as header row and first column.
    pub fn write_delimited<W: std::io::Write>(&self, out: W, delimiter: u8) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(out);
        let csv_err = |e: csv::Error| Error::Config(format!("writing matrix: {e}"));
        let mut header = vec![String::new()];
        header.extend(self.tickers.iter().cloned());
        w.write_record(&header).map_err(csv_err)?;
        for (i, t) in self.tickers.iter().enumerate() {
            let mut rec = vec![t.clone()];
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io("flushing matrix", e))
    }

    /// Reads a matrix written by [`DistanceMatrix::write_delimited`].
    pub fn read_delimited<R: std::io::Read>(
        input: R,
        delimiter: u8,
        method: DistanceMethod,
        params: DistanceParams,
    ) -> Result<Self> {
        let origin = std::path::PathBuf::from("<matrix>");
        let mut r = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(true)
            .from_reader(input);
        let fmt = |line: u64, message: String| Error::Format {
            path: origin.clone(),
            line,
            message,
        };
        let tickers: Vec<String> = r
            .headers()
            .map_err(|e| fmt(1, e.to_string()))?
            .iter()
            .skip(1)
            .map(str::to_owned)
            .collect();
        let n = tickers.len();
        let mut values = Vec::with_capacity(n * n);
        for (row, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| fmt(row as u64 + 2, e.to_string()))?;
            if rec.get(0) != tickers.get(row).map(String::as_str) {
                return Err(fmt(
                    row as u64 + 2,
                    "row label does not match header".into(),
                ));
            }
            for cell in rec.iter().skip(1) {
                values.push(
                    cell.parse::<f64>()
                        .map_err(|e| fmt(row as u64 + 2, format!("{cell:?}: {e}")))?,
                );
            }
        }
        if values.len() != n * n {
            return Err(fmt(
                0,
                format!("expected {n}x{n} values, got {}", values.len()),
            ));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(fmt(i as u64 + 2, "non-zero diagonal".into()));
            }
            for j in i + 1..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(fmt(i as u64 + 2, format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        let upper: Vec<f64> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| values[i * n + j])
            .collect();
        Self::from_upper(tickers, method, params, &upper)
    }
}

#[derive(Debug, Serialize)]
pub struct MatrixReport<'a> {
    pub tickers: &'a [String],
    pub method: DistanceMethod,
    pub alphabet_size: Option<u32>,
    pub corr_metric: Option<CorrMetric>,
    pub negative_mir_pairs: usize,
    pub total_pairs: usize,
    pub negative_mir_fraction: f64,
    pub values: Vec<&'a [f64]>,
}

fn pair_indices(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

fn check_instrument_count(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: n,
            context: "instruments for a distance matrix".into(),
        });
    }
    Ok(())
}

/// Distance matrix over return series. MIR methods discretize each series
/// with `params.alphabet_size` first.
pub fn build_matrix(
    series: &[ReturnSeries],
    method: DistanceMethod,
    params: &DistanceParams,
) -> Result<DistanceMatrix> {
    check_instrument_count(series.len())?;
    if method.uses_symbols() {
        let symbols = series
            .iter()
            .map(|r| discretize(r, params.alphabet_size))
            .collect::<Result<Vec<_>>>()?;
        return build_symbol_matrix(&symbols, method, params);
    }

    let tickers: Vec<String> = series.iter().map(|s| s.ticker.clone()).collect();
    let upper = pair_indices(series.len())
        .into_par_iter()
        .map(|(i, j)| {
            corr_distance(&series[i].returns, &series[j].returns, params.corr_metric)
                .map_err(|e| e.in_pair(&tickers[i], &tickers[j]))
        })
        .collect::<Result<Vec<_>>>()?;
    DistanceMatrix::from_upper(tickers, method, *params, &upper)
}

/// MIR-method distance matrix over already discretized sequences.
pub fn build_symbol_matrix(
    symbols: &[SymbolSequence],
    method: DistanceMethod,
    params: &DistanceParams,
) -> Result<DistanceMatrix> {
    check_instrument_count(symbols.len())?;
    if !method.uses_symbols() {
        return Err(Error::Config(
            "correlation distance needs return series, not symbols".into(),
        ));
    }
    let tickers: Vec<String> = symbols.iter().map(|s| s.ticker.clone()).collect();
    if let Some(s) = symbols.iter().find(|s| s.len() != symbols[0].len()) {
        return Err(Error::Alignment {
            left: symbols[0].len(),
            right: s.len(),
        });
    }

    // Marginal rates are shared by every pair an instrument takes part in.
    let marginal = symbols
        .par_iter()
        .map(|s| lz::entropy_rate(s, &params.lz).map(|e| e.value))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(format!("marginal entropy rate: {e}")))?;

    let pairs = pair_indices(symbols.len())
        .into_par_iter()
        .map(|(i, j)| -> Result<Option<MirDistances>> {
            let (x, y) = (&symbols[i], &symbols[j]);
            if x.is_constant() && y.is_constant() {
                return if params.degenerate_as_zero {
                    Ok(None)
                } else {
                    Err(Error::DegeneratePair.in_pair(&tickers[i], &tickers[j]))
                };
            }
            let hr_xy = lz::joint_entropy_rate(x, y, &params.lz)
                .map_err(|e| e.in_pair(&tickers[i], &tickers[j]))?
                .value;
            Ok(Some(MirDistances::from_rates(&MutualLz {
                hr_x: marginal[i],
                hr_y: marginal[j],
                hr_xy,
            })))
        })
        .collect::<Result<Vec<_>>>()?;

    let clamp = ClampStats {
        negative_pairs: pairs.iter().flatten().filter(|m| m.clamped).count(),
        total_pairs: pairs.len(),
    };
    let upper: Vec<f64> = pairs
        .iter()
        .map(|m| match (m, method) {
            (None, _) => 0.0,
            (Some(m), DistanceMethod::MirPrime) => m.d_prime,
            (Some(m), _) => m.d,
        })
        .collect();
    let mut params = *params;
    params.alphabet_size = symbols[0].alphabet_size;
    let mut m = DistanceMatrix::from_upper(tickers, method, params, &upper)?;
    m.clamp = clamp;
    Ok(m)
}

/// A triple whose distances break the triangle inequality by more than the slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `d(i,k) − d(i,j) − d(j,k)`.
    pub excess: f64,
}

/// Checks `d(i,k) ≤ d(i,j) + d(j,k) + slack` over every ordered choice of middle point.
pub fn triangle_violations(m: &DistanceMatrix, slack: f64) -> Vec<TriangleViolation> {
    let n = m.len();
    let mut out = Vec::new();
    for i in 0..n {
        for k in i + 1..n {
            for j in (0..n).filter(|&j| j != i && j != k) {
                let excess = m.get(i, k) - m.get(i, j) - m.get(j, k);
                if excess > slack {
                    out.push(TriangleViolation { i, j, k, excess });
                }
            }
        }
    }
    out
}

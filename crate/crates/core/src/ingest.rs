//! Price tables, log returns and equal-frequency symbolization.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How to read a delimited price table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TableSpec {
    pub delimiter: char,
    pub date_column: String,
    /// Restrict loading to these ticker columns. `None` loads every non-date column.
    pub tickers: Option<Vec<String>>,
}

impl Default for TableSpec {
    fn default() -> Self {
        Self {
            delimiter: ',',
            date_column: "date".to_owned(),
            tickers: None,
        }
    }
}

/// Daily closing prices of one instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    ticker: String,
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(ticker: impl Into<String>, dates: Vec<NaiveDate>, prices: Vec<f64>) -> Result<Self> {
        let ticker = ticker.into();
        if dates.len() != prices.len() {
            return Err(Error::Alignment {
                left: dates.len(),
                right: prices.len(),
            });
        }
        if prices.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: prices.len(),
                context: format!("prices for {ticker}"),
            });
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "dates for {ticker} are not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some((d, &p)) = dates
            .iter()
            .zip(&prices)
            .find(|(_, p)| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::NonPositivePrice {
                ticker,
                date: d.to_string(),
                value: p,
            });
        }
        Ok(Self {
            ticker,
            dates,
            prices,
        })
    }

    pub fn ticker(&self) -> &str {
        &self.ticker
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }
}

/// Log returns `ln(p[t+1] / p[t])` of one instrument.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub ticker: String,
    pub returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(ticker: impl Into<String>, returns: Vec<f64>) -> Result<Self> {
        if returns.iter().any(|r| !r.is_finite()) {
            return Err(Error::Config("returns must be finite".into()));
        }
        Ok(Self {
            ticker: ticker.into(),
            returns,
        })
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

/// A return series mapped onto the alphabet `0..alphabet_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    pub ticker: String,
    pub alphabet_size: u32,
    pub symbols: Vec<u32>,
}

impl SymbolSequence {
    pub fn new(ticker: impl Into<String>, alphabet_size: u32, symbols: Vec<u32>) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::Config(format!(
                "alphabet size must be at least 2, got {alphabet_size}"
            )));
        }
        if let Some(s) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::Config(format!(
                "symbol {s} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(Self {
            ticker: ticker.into(),
            alphabet_size,
            symbols,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.symbols.windows(2).all(|w| w[0] == w[1])
    }
}

fn parse_price(raw: &str) -> Option<std::result::Result<f64, ()>> {
    let raw = raw.trim();
    if raw.is_empty() || ["na", "nan", "null", "-"].contains(&raw.to_ascii_lowercase().as_str()) {
        return None;
    }
    // Spreadsheets sometimes export U+2212 instead of an ASCII hyphen.
    let normalized = raw.replace('\u{2212}', "-");
    Some(normalized.parse::<f64>().map_err(|_| ()))
}

/// Loads a delimited price table from disk. See [`read_price_table`].
pub fn load_price_table(path: impl AsRef<Path>, spec: &TableSpec) -> Result<Vec<PriceSeries>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    read_price_table(file, path, spec)
}

/// Reads a price table with a header row (`date` plus one column per ticker).
///
/// Rows with a missing price for any selected ticker are dropped from every
/// series, so all returned series share the same dates.
pub fn read_price_table<R: Read>(
    reader: R,
    origin: &Path,
    spec: &TableSpec,
) -> Result<Vec<PriceSeries>> {
    if !spec.delimiter.is_ascii() {
        return Err(Error::Config(format!(
            "delimiter {:?} must be a single ASCII character",
            spec.delimiter
        )));
    }
    let format_err = |line: u64, message: String| Error::Format {
        path: origin.to_path_buf(),
        line,
        message,
    };

    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter as u8)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);

    let header = rdr
        .headers()
        .map_err(|e| format_err(1, e.to_string()))?
        .clone();
    let date_idx = header
        .iter()
        .position(|h| h == spec.date_column)
        .ok_or_else(|| format_err(1, format!("no date column named {:?}", spec.date_column)))?;

    let columns: Vec<(usize, String)> = match &spec.tickers {
        Some(wanted) => wanted
            .iter()
            .map(|t| {
                header
                    .iter()
                    .position(|h| h == t)
                    .map(|i| (i, t.clone()))
                    .ok_or_else(|| format_err(1, format!("no column for ticker {t:?}")))
            })
            .collect::<Result<_>>()?,
        None => header
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != date_idx)
            .map(|(i, h)| (i, h.to_owned()))
            .collect(),
    };
    if columns.is_empty() {
        return Err(format_err(1, "no ticker columns".into()));
    }

    let mut dates = Vec::new();
    let mut prices: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    let mut row = Vec::with_capacity(columns.len());

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let date_raw = &record[date_idx];
        let date = NaiveDate::parse_from_str(date_raw, "%Y-%m-%d")
            .map_err(|e| format_err(line, format!("bad date {date_raw:?}: {e}")))?;

        row.clear();
        let mut complete = true;
        for (idx, ticker) in &columns {
            match parse_price(&record[*idx]) {
                None => complete = false,
                Some(Err(())) => {
                    return Err(format_err(
                        line,
                        format!("unparseable price {:?} for {ticker}", &record[*idx]),
                    ))
                }
                Some(Ok(p)) if !(p.is_finite() && p > 0.0) => {
                    return Err(Error::NonPositivePrice {
                        ticker: ticker.clone(),
                        date: date.to_string(),
                        value: p,
                    })
                }
                Some(Ok(p)) => row.push(p),
            }
        }
        if !complete {
            log::debug!("dropping {date}: missing price");
            continue;
        }
        if let Some(prev) = dates.last() {
            if *prev >= date {
                return Err(format_err(
                    line,
                    format!("date {date} does not follow {prev}"),
                ));
            }
        }
        dates.push(date);
        for (col, &p) in prices.iter_mut().zip(&row) {
            col.push(p);
        }
    }

    if dates.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: dates.len(),
            context: format!("complete rows in {}", origin.display()),
        });
    }

    columns
        .into_iter()
        .zip(prices)
        .map(|((_, ticker), p)| PriceSeries::new(ticker, dates.clone(), p))
        .collect()
}

pub fn log_returns(p: &PriceSeries) -> ReturnSeries {
    ReturnSeries {
        ticker: p.ticker.clone(),
        returns: p.prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect(),
    }
}

/// Stable rank of every observation: ties keep their original order.
pub fn stable_ranks(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // `sort_by` is stable, so equal values keep index order.
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        ranks[idx] = rank;
    }
    ranks
}

/// Whether `alphabet_size` exceeds the `floor(sqrt(len))` guidance for bin counts.
pub fn exceeds_bin_guidance(len: usize, alphabet_size: u32) -> bool {
    (alphabet_size as usize) > (len as f64).sqrt().floor() as usize
}

/// Equal-frequency discretization: observation of stable rank `k` among `m`
/// gets symbol `floor(k * alphabet_size / m)`.
pub fn discretize(r: &ReturnSeries, alphabet_size: u32) -> Result<SymbolSequence> {
    if alphabet_size < 2 {
        return Err(Error::Config(format!(
            "alphabet size must be at least 2, got {alphabet_size}"
        )));
    }
    let m = r.returns.len();
    if m < alphabet_size as usize {
        return Err(Error::InsufficientData {
            needed: alphabet_size as usize,
            got: m,
            context: format!("returns of {} for {alphabet_size} bins", r.ticker),
        });
    }
    if exceeds_bin_guidance(m, alphabet_size) {
        log::warn!(
            "{}: {alphabet_size} bins exceeds sqrt of sample size {m}",
            r.ticker
        );
    }
    let alpha = alphabet_size as u64;
    let symbols = stable_ranks(&r.returns)
        .into_iter()
        .map(|k| ((k as u64 * alpha) / m as u64) as u32)
        .collect();
    Ok(SymbolSequence {
        ticker: r.ticker.clone(),
        alphabet_size,
        symbols,
    })
}

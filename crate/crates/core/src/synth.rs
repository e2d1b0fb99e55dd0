//! Synthetic price tables with controlled dependence structure: independent
//! instruments, common-factor (linear) groups, near copies, and a nonlinear
//! mode driven by the magnitude of another instrument's return, which is
//! uncorrelated with it but clearly dependent.

use std::collections::HashMap;
use std::io::Write;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PriceSeries, ReturnSeries};

/// `E|Z|` for a standard normal `Z`.
const MEAN_ABS_NORMAL: f64 = 0.797_884_560_802_865_4;
/// `sd(|Z|) = sqrt(1 − 2/π)`.
const SD_ABS_NORMAL: f64 = 0.602_810_275_945_493_1;

/// Idiosyncratic noise of the `|x|`-driven member in the pair preset.
pub const NONLINEAR_NOISE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairMode {
    Independent,
    NearIdentity,
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstrumentSpec {
    /// Independent Gaussian returns.
    Iid { ticker: String },
    /// `loading·F_k + sqrt(1 − loading²)·ε` for common factor `k`.
    Factor {
        ticker: String,
        factor: usize,
        loading: f64,
    },
    /// Another instrument's standardized return plus `noise·ε`.
    NoisyCopy {
        ticker: String,
        source: String,
        noise: f64,
    },
    /// Standardized `|x|` of the source plus `noise·ε`; uncorrelated with `x`.
    AbsDriven {
        ticker: String,
        source: String,
        noise: f64,
    },
}

impl InstrumentSpec {
    pub fn ticker(&self) -> &str {
        match self {
            InstrumentSpec::Iid { ticker }
            | InstrumentSpec::Factor { ticker, .. }
            | InstrumentSpec::NoisyCopy { ticker, .. }
            | InstrumentSpec::AbsDriven { ticker, .. } => ticker,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Number of returns; the price table has one more row.
    pub days: usize,
    pub seed: u64,
    /// Daily return volatility applied to every standardized series.
    #[serde(default = "default_vol")]
    pub volatility: f64,
    #[serde(default = "default_start")]
    pub start: NaiveDate,
    #[serde(rename = "instrument")]
    pub instruments: Vec<InstrumentSpec>,
}

fn default_vol() -> f64 {
    0.02
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2009, 1, 5).unwrap()
}

impl SynthSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("synth spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading synth spec {}", path.display()), e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("synth spec: {m}")));
        if self.days < 1 {
            return bad("days must be positive".into());
        }
        if self.instruments.is_empty() {
            return bad("no instruments".into());
        }
        if !(self.volatility.is_finite() && self.volatility > 0.0) {
            return bad(format!("volatility {} must be positive", self.volatility));
        }
        let mut seen = Vec::new();
        for inst in &self.instruments {
            let t = inst.ticker();
            if t.is_empty() || t == "date" || seen.contains(&t) {
                return bad(format!("invalid or duplicate ticker {t:?}"));
            }
            match inst {
                InstrumentSpec::Factor { loading, .. } if !(-1.0..=1.0).contains(loading) => {
                    return bad(format!("{t}: loading {loading} outside [-1, 1]"))
                }
                InstrumentSpec::NoisyCopy { source, noise, .. }
                | InstrumentSpec::AbsDriven { source, noise, .. } => {
                    if !seen.contains(&source.as_str()) {
                        return bad(format!("{t}: source {source:?} must be listed earlier"));
                    }
                    if !(noise.is_finite() && *noise >= 0.0) {
                        return bad(format!("{t}: noise {noise} must be non-negative"));
                    }
                }
                _ => {}
            }
            seen.push(t);
        }
        Ok(())
    }

    /// Fifteen instruments: three factor groups of four, a near copy, an
    /// `|x|`-driven instrument and an independent one.
    pub fn wig20_like(days: usize, seed: u64) -> Self {
        let mut instruments = Vec::new();
        let loadings = [0.8, 0.7, 0.6, 0.5];
        for g in 0..3 {
            for (k, &loading) in loadings.iter().enumerate() {
                instruments.push(InstrumentSpec::Factor {
                    ticker: format!("S{g}{k}"),
                    factor: g,
                    loading,
                });
            }
        }
        instruments.push(InstrumentSpec::NoisyCopy {
            ticker: "COPY".into(),
            source: "S00".into(),
            noise: 0.3,
        });
        instruments.push(InstrumentSpec::AbsDriven {
            ticker: "ABS".into(),
            source: "S10".into(),
            noise: 0.5,
        });
        instruments.push(InstrumentSpec::Iid {
            ticker: "IND".into(),
        });
        Self {
            days,
            seed,
            volatility: default_vol(),
            start: default_start(),
            instruments,
        }
    }

    /// Two instruments with the given dependence.
    pub fn pair(mode: PairMode, days: usize, seed: u64) -> Self {
        let x = InstrumentSpec::Iid { ticker: "X".into() };
        let y = match mode {
            PairMode::Independent => InstrumentSpec::Iid { ticker: "Y".into() },
            PairMode::NearIdentity => InstrumentSpec::NoisyCopy {
                ticker: "Y".into(),
                source: "X".into(),
                noise: 0.01,
            },
            PairMode::Nonlinear => InstrumentSpec::AbsDriven {
                ticker: "Y".into(),
                source: "X".into(),
                noise: NONLINEAR_NOISE,
            },
        };
        Self {
            days,
            seed,
            volatility: default_vol(),
            start: default_start(),
            instruments: vec![x, y],
        }
    }

    /// `n` instruments spread over `groups` common factors with varying loadings.
    pub fn factor_universe(n: usize, groups: usize, days: usize, seed: u64) -> Self {
        let groups = groups.max(1);
        let instruments = (0..n)
            .map(|i| InstrumentSpec::Factor {
                ticker: format!("T{i:03}"),
                factor: i % groups,
                loading: 0.3 + 0.5 * ((i / groups) % 5) as f64 / 4.0,
            })
            .collect();
        Self {
            days,
            seed,
            volatility: default_vol(),
            start: default_start(),
            instruments,
        }
    }
}

/// Standardized (unit-variance) returns before volatility scaling.
fn standardized_returns(spec: &SynthSpec) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normals =
        |len: usize| -> Vec<f64> { (0..len).map(|_| rng.sample(StandardNormal)).collect() };

    let n_factors = spec
        .instruments
        .iter()
        .filter_map(|i| match i {
            InstrumentSpec::Factor { factor, .. } => Some(factor + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let factors: Vec<Vec<f64>> = (0..n_factors).map(|_| normals(spec.days)).collect();

    let mut by_ticker: HashMap<&str, usize> = HashMap::new();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(spec.instruments.len());
    for (idx, inst) in spec.instruments.iter().enumerate() {
        let eps = normals(spec.days);
        let series = match inst {
            InstrumentSpec::Iid { .. } => eps,
            InstrumentSpec::Factor {
                factor, loading, ..
            } => {
                let idio = (1.0 - loading * loading).sqrt();
                factors[*factor]
                    .iter()
                    .zip(&eps)
                    .map(|(f, e)| loading * f + idio * e)
                    .collect()
            }
            InstrumentSpec::NoisyCopy { source, noise, .. } => {
                let src = &out[by_ticker[source.as_str()]];
                src.iter().zip(&eps).map(|(x, e)| x + noise * e).collect()
            }
            InstrumentSpec::AbsDriven { source, noise, .. } => {
                let src = &out[by_ticker[source.as_str()]];
                src.iter()
                    .zip(&eps)
                    .map(|(x, e)| (x.abs() - MEAN_ABS_NORMAL) / SD_ABS_NORMAL + noise * e)
                    .collect()
            }
        };
        by_ticker.insert(inst.ticker(), idx);
        out.push(series);
    }
    out
}

pub fn generate_returns(spec: &SynthSpec) -> Result<Vec<ReturnSeries>> {
    spec.validate()?;
    standardized_returns(spec)
        .into_iter()
        .zip(&spec.instruments)
        .map(|(r, inst)| {
            ReturnSeries::new(
                inst.ticker(),
                r.into_iter().map(|x| x * spec.volatility).collect(),
            )
        })
        .collect()
}

/// Weekday calendar starting at `start`.
pub fn trading_days(start: NaiveDate, count: usize) -> Vec<NaiveDate> {
    let mut d = start;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

pub fn generate_prices(spec: &SynthSpec) -> Result<Vec<PriceSeries>> {
    let returns = generate_returns(spec)?;
    let dates = trading_days(spec.start, spec.days + 1);
    returns
        .into_iter()
        .map(|r| {
            let mut p = Vec::with_capacity(r.returns.len() + 1);
            let mut level = 100.0f64;
            p.push(level);
            for x in &r.returns {
                level *= x.exp();
                p.push(level);
            }
            PriceSeries::new(r.ticker, dates.clone(), p)
        })
        .collect()
}

/// Writes series sharing one calendar as a `date,<ticker>..` table.
pub fn write_price_table<W: Write>(series: &[PriceSeries], out: W, delimiter: u8) -> Result<()> {
    let Some(first) = series.first() else {
        return Err(Error::Config("no series to write".into()));
    };
    if series.iter().any(|s| s.dates() != first.dates()) {
        return Err(Error::Config("series do not share a calendar".into()));
    }
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(out);
    let csv_err = |e: csv::Error| Error::Config(format!("writing price table: {e}"));
    let mut header = vec!["date".to_owned()];
    header.extend(series.iter().map(|s| s.ticker().to_owned()));
    w.write_record(&header).map_err(csv_err)?;
    for (t, d) in first.dates().iter().enumerate() {
        let mut rec = vec![d.to_string()];
        rec.extend(series.iter().map(|s| s.prices()[t].to_string()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("flushing price table", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::pearson;

    #[test]
    fn deterministic_for_seed() {
        let spec = SynthSpec::wig20_like(50, 3);
        assert_eq!(
            generate_returns(&spec).unwrap(),
            generate_returns(&spec).unwrap()
        );
        let other = SynthSpec::wig20_like(50, 4);
        assert_ne!(
            generate_returns(&spec).unwrap(),
            generate_returns(&other).unwrap()
        );
    }

    #[test]
    fn wig20_shape() {
        let prices = generate_prices(&SynthSpec::wig20_like(20, 1)).unwrap();
        assert_eq!(prices.len(), 15);
        assert!(prices.iter().all(|p| p.len() == 21));
    }

    #[test]
    fn abs_driven_is_uncorrelated_but_factor_is_not() {
        let spec = SynthSpec::wig20_like(20_000, 11);
        let r = generate_returns(&spec).unwrap();
        let get = |t: &str| &r.iter().find(|s| s.ticker == t).unwrap().returns;
        assert!(pearson(get("S10"), get("ABS")).unwrap().abs() < 0.05);
        assert!(pearson(get("S00"), get("S01")).unwrap() > 0.4);
        assert!(pearson(get("S00"), get("COPY")).unwrap() > 0.9);
    }

    #[test]
    fn rejects_forward_references_and_duplicates() {
        let mut spec = SynthSpec::wig20_like(10, 1);
        spec.instruments.insert(
            0,
            InstrumentSpec::AbsDriven {
                ticker: "X".into(),
                source: "S00".into(),
                noise: 0.1,
            },
        );
        assert!(spec.validate().is_err());
        let mut dup = SynthSpec::wig20_like(10, 1);
        dup.instruments.push(InstrumentSpec::Iid {
            ticker: "S00".into(),
        });
        assert!(dup.validate().is_err());
    }

    #[test]
    fn weekday_calendar() {
        let d = trading_days(NaiveDate::from_ymd_opt(2024, 1, 5).unwrap(), 3);
        assert_eq!(d[1], NaiveDate::from_ymd_opt(2024, 1, 8).unwrap());
    }

    #[test]
    fn spec_parses_from_toml() {
        let text = r#"
            days = 10
            seed = 5
            [[instrument]]
            kind = "iid"
            ticker = "A"
            [[instrument]]
            kind = "abs_driven"
            ticker = "B"
            source = "A"
            noise = 0.2
        "#;
        let spec: SynthSpec = toml::from_str(text).unwrap();
        assert_eq!(spec.instruments.len(), 2);
        assert_eq!(spec.volatility, 0.02);
        spec.validate().unwrap();
    }
}

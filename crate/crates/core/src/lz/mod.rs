//! Lempel-Ziv match-length estimators of entropy rate, joint entropy rate
//! and mutual information rate of symbol sequences.
//!
//! For position `i` (1-based) the match length `Λ_i` is one more than the
//! longest prefix of `s[i..]` that also starts at some earlier position
//! `j < i`. The earlier occurrence may overlap position `i`; neither may run
//! past the end of the sequence. `Λ_1 = 1`. The entropy-rate estimate is
//! `n·log2(n) / Σ Λ_i` bits per symbol.

mod suffix;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::SymbolSequence;

/// Below this many symbols the estimator is considered unreliable.
pub const DEFAULT_MIN_LEN: usize = 500;

/// Anything that can be parsed as a sequence over `0..alphabet_size`.
pub trait Symbols {
    fn symbols(&self) -> &[u32];
    fn alphabet_size(&self) -> u64;
}

impl Symbols for SymbolSequence {
    fn symbols(&self) -> &[u32] {
        &self.symbols
    }
    fn alphabet_size(&self) -> u64 {
        self.alphabet_size as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LzConfig {
    pub min_len: usize,
    /// Estimate below `min_len` with a warning instead of failing.
    pub allow_short: bool,
}

impl Default for LzConfig {
    fn default() -> Self {
        Self {
            min_len: DEFAULT_MIN_LEN,
            allow_short: false,
        }
    }
}

/// An entropy-rate estimate in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LzEstimate {
    pub value: f64,
    pub n: usize,
    pub alphabet_size: u64,
}

impl LzEstimate {
    /// True when the estimate overshoots `log2(alphabet_size)` by more than 10%,
    /// which happens on short samples.
    pub fn overshoots(&self) -> bool {
        self.value > 1.1 * (self.alphabet_size as f64).log2()
    }
}

/// Pair of sequences recoded onto the product alphabet: `z = x + y·α_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSequence {
    pub symbols: Vec<u32>,
    pub component_alphabets: (u32, u32),
}

impl JointSequence {
    /// Recovers `(x_j, y_j)`.
    pub fn decompose(&self, j: usize) -> (u32, u32) {
        let ax = self.component_alphabets.0;
        (self.symbols[j] % ax, self.symbols[j] / ax)
    }
}

impl Symbols for JointSequence {
    fn symbols(&self) -> &[u32] {
        &self.symbols
    }
    fn alphabet_size(&self) -> u64 {
        self.component_alphabets.0 as u64 * self.component_alphabets.1 as u64
    }
}

/// Match lengths `Λ_1..Λ_n` over the full past.
///
/// Runs in O(n log n): a suffix array orders all suffixes, and the longest
/// match against any earlier start is attained at the nearest earlier-start
/// suffix on either side in suffix order.
pub fn match_lengths(s: &[u32]) -> Result<Vec<usize>> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: n,
            context: "symbols for match lengths".into(),
        });
    }
    let sa = suffix::suffix_array(s);
    let mut rank = vec![0; n];
    for (r, &i) in sa.iter().enumerate() {
        rank[i] = r;
    }
    let lcp = suffix::RangeMin::new(suffix::lcp_array(s, &sa, &rank));

    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    for (i, &r) in rank.iter().enumerate() {
        let below = seen
            .range(..r)
            .next_back()
            .map_or(0, |&p| lcp.min(p + 1, r));
        let above = seen.range(r + 1..).next().map_or(0, |&q| lcp.min(r + 1, q));
        out.push(below.max(above) + 1);
        seen.insert(r);
        debug_assert!(out[i] <= n - i + 1);
    }
    Ok(out)
}

fn check_length(n: usize, cfg: &LzConfig) -> Result<()> {
    if n < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: n,
            context: "symbols for entropy rate".into(),
        });
    }
    if n < cfg.min_len {
        if !cfg.allow_short {
            return Err(Error::TooShort {
                len: n,
                min: cfg.min_len,
            });
        }
        log::warn!(
            "entropy rate on {n} symbols (< {}); estimate is unreliable",
            cfg.min_len
        );
    }
    Ok(())
}

pub fn entropy_rate<S: Symbols + ?Sized>(s: &S, cfg: &LzConfig) -> Result<LzEstimate> {
    let symbols = s.symbols();
    let n = symbols.len();
    check_length(n, cfg)?;
    let total: usize = match_lengths(symbols)?.into_iter().sum();
    let nf = n as f64;
    let value = nf * nf.log2() / total as f64;
    let est = LzEstimate {
        value,
        n,
        alphabet_size: s.alphabet_size(),
    };
    if est.overshoots() {
        log::warn!(
            "entropy rate {value:.3} exceeds log2({}) by more than 10% at n = {n}",
            est.alphabet_size
        );
    }
    Ok(est)
}

pub fn join(x: &SymbolSequence, y: &SymbolSequence) -> Result<JointSequence> {
    if x.len() != y.len() {
        return Err(Error::Alignment {
            left: x.len(),
            right: y.len(),
        });
    }
    let ax = x.alphabet_size;
    if (ax as u64) * (y.alphabet_size as u64) > u32::MAX as u64 + 1 {
        return Err(Error::Config(format!(
            "joint alphabet {ax}x{} does not fit in 32 bits",
            y.alphabet_size
        )));
    }
    Ok(JointSequence {
        symbols: x
            .symbols
            .iter()
            .zip(&y.symbols)
            .map(|(&a, &b)| a + b * ax)
            .collect(),
        component_alphabets: (ax, y.alphabet_size),
    })
}

pub fn joint_entropy_rate(
    x: &SymbolSequence,
    y: &SymbolSequence,
    cfg: &LzConfig,
) -> Result<LzEstimate> {
    entropy_rate(&join(x, y)?, cfg)
}

/// The three rates behind a mutual LZ complexity value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MutualLz {
    pub hr_x: f64,
    pub hr_y: f64,
    pub hr_xy: f64,
}

impl MutualLz {
    /// `HR(X) + HR(Y) − HR(X,Y)`, unclamped. Finite samples can make it negative.
    pub fn value(&self) -> f64 {
        self.hr_x + self.hr_y - self.hr_xy
    }
}

pub fn mutual_lz_parts(x: &SymbolSequence, y: &SymbolSequence, cfg: &LzConfig) -> Result<MutualLz> {
    let hr_xy = joint_entropy_rate(x, y, cfg)?.value;
    Ok(MutualLz {
        hr_x: entropy_rate(x, cfg)?.value,
        hr_y: entropy_rate(y, cfg)?.value,
        hr_xy,
    })
}

pub fn mutual_lz(x: &SymbolSequence, y: &SymbolSequence, cfg: &LzConfig) -> Result<f64> {
    mutual_lz_parts(x, y, cfg).map(|m| m.value())
}

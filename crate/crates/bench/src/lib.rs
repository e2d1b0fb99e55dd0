//! Shared fixtures for the criterion benchmarks.

use mirnet_core::synth::{generate_returns, SynthSpec};
use mirnet_core::{discretize, ReturnSeries, SymbolSequence};

pub fn factor_returns(n: usize, days: usize, seed: u64) -> Vec<ReturnSeries> {
    generate_returns(&SynthSpec::factor_universe(n, 5, days, seed)).expect("valid synth spec")
}

pub fn symbols(returns: &[ReturnSeries], alphabet: u32) -> Vec<SymbolSequence> {
    returns
        .iter()
        .map(|r| discretize(r, alphabet).expect("enough observations"))
        .collect()
}

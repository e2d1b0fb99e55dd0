use std::io::Cursor;
use std::path::Path;

use mirnet_core::ingest::{read_price_table, stable_ranks};
use mirnet_core::{discretize, log_returns, Error, ReturnSeries, TableSpec};
use proptest::prelude::*;

fn returns(v: Vec<f64>) -> ReturnSeries {
    ReturnSeries::new("r", v).unwrap()
}

proptest! {
    #[test]
    fn symbol_counts_are_balanced(
        (alpha, v) in (2u32..12).prop_flat_map(|a| (Just(a), prop::collection::vec(-1e3f64..1e3, a as usize..400))),
    ) {
        let s = discretize(&returns(v.clone()), alpha).unwrap();
        let mut counts = vec![0usize; alpha as usize];
        for &sym in &s.symbols {
            counts[sym as usize] += 1;
        }
        let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
        prop_assert!(hi - lo <= 1, "{counts:?}");
    }

    #[test]
    fn discretization_is_invariant_under_monotone_maps(
        (alpha, v) in (2u32..10).prop_flat_map(|a| (Just(a), prop::collection::vec(-5f64..5.0, a as usize..300))),
        scale in 0.01f64..100.0,
        shift in -10f64..10.0,
    ) {
        let mapped: Vec<f64> = v.iter().map(|x| (scale * x + shift).exp()).collect();
        let a = discretize(&returns(v), alpha).unwrap();
        let b = discretize(&returns(mapped), alpha).unwrap();
        prop_assert_eq!(a.symbols, b.symbols);
    }

    #[test]
    fn ranks_are_a_permutation(v in prop::collection::vec(-1f64..1.0, 0..200)) {
        let mut r = stable_ranks(&v);
        r.sort_unstable();
        prop_assert_eq!(r, (0..v.len()).collect::<Vec<_>>());
    }
}

#[test]
fn table_round_trip_gives_log_returns() {
    let text =
        "date,A,B\n2020-01-01,100,50\n2020-01-02,110,NA\n2020-01-03,121,55\n2020-01-06,121,60.5\n";
    let series =
        read_price_table(Cursor::new(text), Path::new("t.csv"), &TableSpec::default()).unwrap();
    assert_eq!(series.len(), 2);
    // the NA row is dropped for every instrument
    assert_eq!(series[0].len(), 3);
    let r = log_returns(&series[0]);
    assert!((r.returns[0] - 1.21f64.ln()).abs() < 1e-12);
    assert_eq!(r.returns[1], 0.0);
}

#[test]
fn semicolon_tables_and_ticker_selection() {
    let text = "day;X;Y;Z\n2021-03-01;1;2;3\n2021-03-02;2;3;4\n2021-03-03;3;4;5\n";
    let spec = TableSpec {
        delimiter: ';',
        date_column: "day".into(),
        tickers: Some(vec!["Z".into(), "X".into()]),
    };
    let series = read_price_table(Cursor::new(text), Path::new("t.csv"), &spec).unwrap();
    let names: Vec<&str> = series.iter().map(|s| s.ticker()).collect();
    assert_eq!(names, ["Z", "X"]);
}

#[test]
fn bad_rows_are_reported_with_location() {
    let text = "date,A\n2020-01-01,1\n2020-01-02,oops\n2020-01-03,2\n";
    match read_price_table(Cursor::new(text), Path::new("t.csv"), &TableSpec::default()) {
        Err(Error::Format { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
    let text = "date,A\n2020-01-01,1\n2020-01-02,-4\n2020-01-03,2\n";
    assert!(matches!(
        read_price_table(Cursor::new(text), Path::new("t.csv"), &TableSpec::default()),
        Err(Error::NonPositivePrice { .. })
    ));
}

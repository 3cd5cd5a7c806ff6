use ltqp::bench::{aggregate, emit_table, latex_row, parse_csv_table, Stat, TableFormat};
use ltqp::engine::{QueryMetrics, Setup};
use ltqp::query::QueryClass;
use proptest::prelude::*;

mod common;

use common::{entity_s_block, PUBLISHED};

#[test]
fn latex_entity_s_block_matches_published_rows() {
    let table = emit_table(&entity_s_block(), TableFormat::Latex);
    assert!(table.contains(PUBLISHED), "{table}");
    assert!(table.starts_with(r"\textbf{Setup} & \multicolumn{2}{c}{\textbf{Results}}"));
    assert_eq!(latex_row(&entity_s_block()[0]), PUBLISHED.lines().nth(1).unwrap());
}

#[test]
fn csv_round_trip_to_two_decimals() {
    let rows = entity_s_block();
    let back = parse_csv_table(&emit_table(&rows, TableFormat::Csv)).unwrap();
    assert_eq!(back.len(), rows.len());
    for (a, b) in rows.iter().zip(&back) {
        assert_eq!((a.class, a.setup, a.class_queries, a.rows), (b.class, b.setup, b.class_queries, b.rows));
        for (x, y) in [(a.results, b.results), (a.time_s, b.time_s), (a.http, b.http), (a.inferred_k, b.inferred_k)] {
            assert!((x.mean - y.mean).abs() < 0.005 && (x.sd - y.sd).abs() < 0.005);
        }
    }
}

#[test]
fn markdown_cells() {
    let md = emit_table(&entity_s_block()[..1], TableFormat::Markdown);
    assert!(md.contains("| entity-s | 79 | base | 10.68 (±10.2) |"), "{md}");
}

fn metric(id: usize, class: QueryClass, setup: Setup, v: f64) -> QueryMetrics {
    QueryMetrics {
        query_id: format!("q{id}"),
        class,
        setup,
        results: v as u64,
        time_s: v,
        first_s: Some(v),
        http: v as u64,
        retrieved: v as u64,
        inferred: 0,
        truncated: false,
    }
}

proptest! {
    #[test]
    fn scaling_inputs_scales_mean_and_sd(values in proptest::collection::vec(0.0f64..1e4, 1..20), k in 0.0f64..100.0) {
        let base = Stat::of(&values).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
        let s = Stat::of(&scaled).unwrap();
        prop_assert!((s.mean - base.mean * k).abs() <= 1e-9 * (1.0 + s.mean.abs()));
        prop_assert!((s.sd - base.sd * k).abs() <= 1e-6 * (1.0 + s.sd.abs()));
    }

    #[test]
    fn group_sizes_sum_to_rows(spec in proptest::collection::vec((0usize..12, 0usize..6, 0u32..50), 0..60)) {
        let rows: Vec<QueryMetrics> = spec
            .iter()
            .enumerate()
            .map(|(i, &(c, s, v))| metric(i, QueryClass::TABLE[c], Setup::ALL[s], f64::from(v)))
            .collect();
        let agg = aggregate(&rows);
        prop_assert_eq!(agg.iter().map(|a| a.rows).sum::<usize>(), rows.len());
        for a in &agg {
            prop_assert!(a.results.sd >= 0.0);
        }
    }
}

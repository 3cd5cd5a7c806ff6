use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::engine::{QueryMetrics, Setup};
use crate::query::QueryClass;

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Stat { mean, sd: var.sqrt() })
    }

    pub fn scaled(self, k: f64) -> Stat {
        Stat {
            mean: self.mean * k,
            sd: self.sd * k.abs(),
        }
    }
}

/// One (class, setup) cell block of the results table. Retrieved and
/// inferred are in thousands of triples.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub class: QueryClass,
    pub class_queries: usize,
    pub setup: Setup,
    /// Input rows in this group.
    pub rows: usize,
    pub results: Stat,
    pub time_s: Stat,
    /// Over the rows that produced a first solution; absent if none did.
    pub first_s: Option<Stat>,
    pub http: Stat,
    pub retrieved_k: Stat,
    pub inferred_k: Stat,
    /// Rows of the group that were cut short by a limit.
    pub truncated: usize,
}

/// Groups by (class, setup) in table order. Queries of class `Other` are
/// left out.
pub fn aggregate(rows: &[QueryMetrics]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(QueryClass, Setup), Vec<&QueryMetrics>> = BTreeMap::new();
    let mut queries: BTreeMap<QueryClass, BTreeSet<&str>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.class != QueryClass::Other) {
        groups.entry((row.class, row.setup)).or_default().push(row);
        queries.entry(row.class).or_default().insert(&row.query_id);
    }
    groups
        .into_iter()
        .map(|((class, setup), group)| {
            let stat = |f: &dyn Fn(&QueryMetrics) -> f64| {
                let values: Vec<f64> = group.iter().map(|r| f(r)).collect();
                Stat::of(&values).expect("groups are nonempty")
            };
            let firsts: Vec<f64> = group.iter().filter_map(|r| r.first_s).collect();
            AggregateRow {
                class,
                class_queries: queries[&class].len(),
                setup,
                rows: group.len(),
                results: stat(&|r| r.results as f64),
                time_s: stat(&|r| r.time_s),
                first_s: Stat::of(&firsts),
                http: stat(&|r| r.http as f64),
                retrieved_k: stat(&|r| r.retrieved as f64).scaled(0.001),
                inferred_k: stat(&|r| r.inferred as f64).scaled(0.001),
                truncated: group.iter().filter(|r| r.truncated).count(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, class: QueryClass, setup: Setup, results: u64, first: Option<f64>) -> QueryMetrics {
        QueryMetrics {
            query_id: id.into(),
            class,
            setup,
            results,
            time_s: 1.0,
            first_s: first,
            http: 3,
            retrieved: 1500,
            inferred: 0,
            truncated: false,
        }
    }

    #[test]
    fn one_two_three() {
        let s = Stat::of(&[1.0, 2.0, 3.0]).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-4);
        assert!((s.sd - 0.8165).abs() < 1e-4);
        assert_eq!(Stat::of(&[10.68]).unwrap().sd, 0.0);
        assert_eq!(Stat::of(&[]), None);
    }

    #[test]
    fn groups_in_table_order() {
        let rows = vec![
            row("b", QueryClass::SPath2, Setup::Base, 1, Some(0.5)),
            row("a", QueryClass::EntityS, Setup::Select, 2, None),
            row("a", QueryClass::EntityS, Setup::Base, 4, Some(0.2)),
            row("c", QueryClass::EntityS, Setup::Base, 0, None),
            row("x", QueryClass::Other, Setup::Base, 9, None),
        ];
        let agg = aggregate(&rows);
        let keys: Vec<_> = agg.iter().map(|a| (a.class, a.setup)).collect();
        assert_eq!(
            keys,
            [
                (QueryClass::EntityS, Setup::Base),
                (QueryClass::EntityS, Setup::Select),
                (QueryClass::SPath2, Setup::Base)
            ]
        );
        assert_eq!(agg[0].class_queries, 2);
        assert_eq!(agg[0].results.mean, 2.0);
        assert_eq!(agg[0].first_s.unwrap().mean, 0.2);
        assert_eq!(agg[1].first_s, None);
        assert!((agg[0].retrieved_k.mean - 1.5).abs() < 1e-12);
    }
}

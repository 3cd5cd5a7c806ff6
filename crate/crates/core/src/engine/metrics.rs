use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::policy::Setup;
use crate::fetch::Fetcher;
use crate::query::{classify, BgpQuery, QueryClass};

/// Per-query counters, one row of the raw benchmark output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryMetrics {
    pub query_id: String,
    pub class: QueryClass,
    pub setup: Setup,
    pub results: u64,
    pub time_s: f64,
    /// Absent when the query produced no solution.
    pub first_s: Option<f64>,
    pub http: u64,
    pub retrieved: u64,
    pub inferred: u64,
    pub truncated: bool,
}

/// What the traversal itself measured.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub results: u64,
    pub elapsed: Duration,
    pub first: Option<Duration>,
    pub inferred: u64,
    pub truncated: bool,
}

pub fn collect_metrics(query: &BgpQuery, setup: Setup, stats: &RunStats, fetcher: &Fetcher) -> QueryMetrics {
    let truncated = stats.truncated || fetcher.budget_exhausted();
    QueryMetrics {
        query_id: query.id.clone(),
        class: classify(query),
        setup,
        results: stats.results,
        time_s: stats.elapsed.as_secs_f64(),
        first_s: if stats.results == 0 {
            None
        } else {
            stats.first.map(|d| d.as_secs_f64())
        },
        http: u64::from(fetcher.lookups()),
        retrieved: fetcher.retrieved_triples(),
        inferred: stats.inferred,
        truncated,
    }
}

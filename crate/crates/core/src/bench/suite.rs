use std::path::{Path, PathBuf};
use std::time::Duration;

use log::{info, warn};
use thiserror::Error;

use crate::engine::{Engine, QueryMetrics, Setup};
use crate::query::{classify, parse_query, BgpQuery, QueryError};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Manifest { path: PathBuf, line: usize, reason: String },
    #[error("query {id} ({path}): {source}")]
    Query {
        id: String,
        path: PathBuf,
        #[source]
        source: QueryError,
    },
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub id: String,
    pub path: PathBuf,
    pub query: BgpQuery,
}

/// Reads a suite manifest of `query-id <TAB> path` lines. Paths are
/// relative to the manifest. Every query must parse.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<SuiteEntry>, SuiteError> {
    let path = path.as_ref();
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| SuiteError::Io { path: p, source }
    };
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((id, rel)) = line.split_once('\t') else {
            return Err(SuiteError::Manifest {
                path: path.to_path_buf(),
                line: idx + 1,
                reason: "expected query-id<TAB>path".into(),
            });
        };
        let qpath = base.join(rel.trim());
        let text = std::fs::read_to_string(&qpath).map_err(io(&qpath))?;
        let query = parse_query(&text, id.trim()).map_err(|source| SuiteError::Query {
            id: id.trim().to_owned(),
            path: qpath.clone(),
            source,
        })?;
        entries.push(SuiteEntry {
            id: id.trim().to_owned(),
            path: qpath,
            query,
        });
    }
    Ok(entries)
}

/// Runs every (query, setup) pair sequentially, in manifest order and then
/// in setup order. A query whose run fails yields a truncated, zeroed row.
pub fn run_entries(entries: &[SuiteEntry], setups: &[Setup], engine: &Engine) -> Vec<QueryMetrics> {
    let mut setups = setups.to_vec();
    setups.sort();
    setups.dedup();
    let mut rows = Vec::with_capacity(entries.len() * setups.len());
    for entry in entries {
        for &setup in &setups {
            let run = engine.execute(&entry.query, setup);
            let row = match run.join() {
                Ok(outcome) => outcome.metrics,
                Err(_) => {
                    warn!("{} under {setup}: run failed", entry.id);
                    failed_row(&entry.query, setup)
                }
            };
            info!(
                "{} {setup}: results={} http={} time_s={:.3}",
                entry.id, row.results, row.http, row.time_s
            );
            rows.push(row);
        }
    }
    rows
}

fn failed_row(query: &BgpQuery, setup: Setup) -> QueryMetrics {
    QueryMetrics {
        query_id: query.id.clone(),
        class: classify(query),
        setup,
        results: 0,
        time_s: Duration::ZERO.as_secs_f64(),
        first_s: None,
        http: 0,
        retrieved: 0,
        inferred: 0,
        truncated: true,
    }
}

/// Loads `manifest` and runs it on `engine`.
pub fn run_suite(manifest: impl AsRef<Path>, setups: &[Setup], engine: &Engine) -> Result<Vec<QueryMetrics>, SuiteError> {
    Ok(run_entries(&load_manifest(manifest)?, setups, engine))
}

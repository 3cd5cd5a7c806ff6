//! Python bindings: run queries and suites, generate fixture webs, and
//! render result tables.

use std::path::PathBuf;
use std::time::Duration;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ltqp::bench::{aggregate, emit_table, metrics_csv, parse_metrics_csv, run_suite, TableFormat};
use ltqp::engine::{parse_setups, EngineOptions, QueryMetrics, QueryOutcome, Setup};
use ltqp::fetch::{FetchConfig, ResolverMode};
use ltqp::fixturegen::{self, OracleFeatures, WebSpec};
use ltqp::query::{classify, parse_query};

create_exception!(ltqp_py, QuerySyntaxError, PyValueError);
create_exception!(ltqp_py, ResolverError, PyException);

fn syntax_err(e: impl ToString) -> PyErr {
    QuerySyntaxError::new_err(e.to_string())
}

fn resolver_err(e: impl ToString) -> PyErr {
    ResolverError::new_err(e.to_string())
}

fn setup_arg(name: &str) -> PyResult<Setup> {
    name.parse().map_err(|e: ltqp::engine::UnknownSetup| PyValueError::new_err(e.to_string()))
}

fn setups_arg(list: &str) -> PyResult<Vec<Setup>> {
    if list.eq_ignore_ascii_case("all") {
        return Ok(Setup::ALL.to_vec());
    }
    parse_setups(list).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn metrics_dict<'py>(py: Python<'py>, m: &QueryMetrics) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("query_id", &m.query_id)?;
    d.set_item("class", m.class.name())?;
    d.set_item("setup", m.setup.name())?;
    d.set_item("results", m.results)?;
    d.set_item("time_s", m.time_s)?;
    d.set_item("first_s", m.first_s)?;
    d.set_item("http", m.http)?;
    d.set_item("retrieved", m.retrieved)?;
    d.set_item("inferred", m.inferred)?;
    d.set_item("truncated", m.truncated)?;
    Ok(d)
}

/// The outcome of one query run.
#[pyclass(frozen, module = "ltqp_py")]
struct QueryResult {
    outcome: QueryOutcome,
}

#[pymethods]
impl QueryResult {
    /// Projected variable names, without the leading `?`.
    #[getter]
    fn variables(&self) -> Vec<String> {
        self.outcome.projection.iter().map(|v| v.name().to_owned()).collect()
    }

    /// Distinct answers as tuples of N-Triples terms, in projection order.
    #[getter]
    fn answers(&self) -> Vec<Vec<String>> {
        self.outcome
            .answers
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect()
    }

    #[getter]
    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        metrics_dict(py, &self.outcome.metrics)
    }

    /// Nontrivial sameAs classes, each sorted; the first member represents it.
    #[getter]
    fn equivalences(&self) -> Vec<Vec<String>> {
        self.outcome
            .equivalences
            .iter()
            .map(|c| c.iter().map(|i| i.as_str().to_owned()).collect())
            .collect()
    }

    /// (IRI, reason) for every dereference, in dispatch order.
    #[getter]
    fn trace(&self) -> Vec<(String, String)> {
        self.outcome
            .trace
            .iter()
            .map(|t| (t.iri.as_str().to_owned(), t.reason.to_string()))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.outcome.answers.len()
    }

    fn __repr__(&self) -> String {
        let m = &self.outcome.metrics;
        format!(
            "QueryResult(setup={}, results={}, http={}, retrieved={}, inferred={})",
            m.setup, m.results, m.http, m.retrieved, m.inferred
        )
    }
}

/// A query engine bound to one resolver (`live`, `fixture:DIR`,
/// `replay:FILE` or `record:FILE`).
#[pyclass(frozen, module = "ltqp_py")]
struct Engine {
    inner: ltqp::engine::Engine,
}

#[pymethods]
impl Engine {
    #[new]
    #[pyo3(signature = (resolver = "live", *, timeout_ms = 10_000, deadline_s = 600.0, redirect_limit = 5, max_lookups = 2000, parallel = 8, politeness_ms = 500, deref_predicates = false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        resolver: &str,
        timeout_ms: u64,
        deadline_s: f64,
        redirect_limit: u32,
        max_lookups: u32,
        parallel: u32,
        politeness_ms: u64,
        deref_predicates: bool,
    ) -> PyResult<Self> {
        let resolver: ResolverMode = resolver.parse().map_err(resolver_err)?;
        let deadline = Duration::try_from_secs_f64(deadline_s).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let config = FetchConfig {
            lookup_timeout: Duration::from_millis(timeout_ms),
            query_deadline: deadline,
            redirect_limit,
            max_lookups,
            max_parallel: parallel,
            politeness: Duration::from_millis(politeness_ms),
            resolver,
        };
        let inner = ltqp::engine::Engine::new(config)
            .map_err(resolver_err)?
            .with_options(EngineOptions { deref_predicates });
        Ok(Engine { inner })
    }

    /// Runs `query` (SPARQL SELECT over a basic graph pattern) under `setup`.
    #[pyo3(signature = (query, setup = "base"))]
    fn run(&self, py: Python<'_>, query: &str, setup: &str) -> PyResult<QueryResult> {
        let query = parse_query(query, "query").map_err(syntax_err)?;
        let setup = setup_arg(setup)?;
        let outcome = py.detach(|| self.inner.run(&query, setup));
        Ok(QueryResult { outcome })
    }

    /// Runs a suite manifest under the given setups; returns one metrics
    /// dict per (query, setup).
    #[pyo3(signature = (manifest, setups = "all"))]
    fn bench<'py>(&self, py: Python<'py>, manifest: PathBuf, setups: &str) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let setups = setups_arg(setups)?;
        let rows = py
            .detach(|| run_suite(&manifest, &setups, &self.inner))
            .map_err(syntax_err)?;
        rows.iter().map(|m| metrics_dict(py, m)).collect()
    }

    /// Like `bench`, returning the per-query metrics as CSV text.
    #[pyo3(signature = (manifest, setups = "all"))]
    fn bench_csv(&self, py: Python<'_>, manifest: PathBuf, setups: &str) -> PyResult<String> {
        let setups = setups_arg(setups)?;
        let rows = py
            .detach(|| run_suite(&manifest, &setups, &self.inner))
            .map_err(syntax_err)?;
        Ok(metrics_csv(&rows))
    }
}

/// The structural class of a query, e.g. `entity-s` or `star-s2-o1`.
#[pyfunction]
fn classify_query(query: &str) -> PyResult<String> {
    let q = parse_query(query, "query").map_err(syntax_err)?;
    Ok(classify(&q).name().to_owned())
}

/// Names of the six setups, in table order.
#[pyfunction]
fn setups() -> Vec<&'static str> {
    Setup::ALL.iter().map(|s| s.name()).collect()
}

/// Aggregates per-query metrics CSV (as written by `bench_csv`) into a
/// results table in `csv`, `markdown` or `latex` format.
#[pyfunction]
#[pyo3(signature = (metrics_csv, format = "markdown"))]
fn results_table(metrics_csv: &str, format: &str) -> PyResult<String> {
    let format: TableFormat = format.parse().map_err(PyValueError::new_err)?;
    let rows = parse_metrics_csv(metrics_csv).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(emit_table(&aggregate(&rows), format))
}

/// Writes a seeded synthetic web with queries and ground truth to `out`.
/// Returns the number of documents and the generated query ids.
#[pyfunction]
#[pyo3(signature = (out, *, seed = 0, entities = 24, docs_per_entity = 1, sameas = 3, seealso = 3, vocab_depth = 2, facts_per_doc = 3, queries_per_class = 2, base = "http://fixture.example/"))]
#[allow(clippy::too_many_arguments)]
fn generate_fixture(
    out: PathBuf,
    seed: u64,
    entities: usize,
    docs_per_entity: usize,
    sameas: usize,
    seealso: usize,
    vocab_depth: usize,
    facts_per_doc: usize,
    queries_per_class: usize,
    base: &str,
) -> PyResult<(usize, Vec<String>)> {
    let spec = WebSpec {
        seed,
        entities,
        docs_per_entity,
        sameas,
        seealso,
        vocab_depth,
        facts_per_doc,
        queries_per_class,
        base: base.to_owned(),
    };
    let web = fixturegen::generate_web(&spec, &out).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((web.documents, web.queries.into_iter().map(|q| q.id).collect()))
}

/// Brute-force answers of `query` over every document of a fixture web.
#[pyfunction]
#[pyo3(signature = (fixture, query, *, same_as = false, rho_df = false))]
fn oracle_eval(fixture: PathBuf, query: &str, same_as: bool, rho_df: bool) -> PyResult<Vec<Vec<String>>> {
    let q = parse_query(query, "query").map_err(syntax_err)?;
    let answers = fixturegen::oracle_eval(&fixture, &q, OracleFeatures { same_as, rho_df }).map_err(resolver_err)?;
    Ok(answers
        .into_iter()
        .map(|row| row.iter().map(ToString::to_string).collect())
        .collect())
}

#[pymodule]
fn ltqp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_class::<QueryResult>()?;
    m.add_function(wrap_pyfunction!(classify_query, m)?)?;
    m.add_function(wrap_pyfunction!(setups, m)?)?;
    m.add_function(wrap_pyfunction!(results_table, m)?)?;
    m.add_function(wrap_pyfunction!(generate_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_eval, m)?)?;
    m.add("QuerySyntaxError", m.py().get_type::<QuerySyntaxError>())?;
    m.add("ResolverError", m.py().get_type::<ResolverError>())?;
    Ok(())
}

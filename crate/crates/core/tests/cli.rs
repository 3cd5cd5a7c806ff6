mod common;

use std::path::Path;
use std::process::{Command, Output};

use ltqp::bench::{parse_csv_table, parse_metrics_csv};
use ltqp::engine::{QueryMetrics, Setup};

fn ltqp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltqp"))
        .args(args)
        .env_remove(ltqp::fetch::RESOLVER_ENV)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn trivial_fixture(dir: &Path) -> String {
    common::write_web(
        dir,
        &[(
            "http://ex.org/e",
            "<http://ex.org/e> <http://ex.org/name> \"a\" .\n<http://ex.org/e> <http://ex.org/name> \"b\" .\n",
        )],
    );
    let q = dir.join("q.rq");
    std::fs::write(&q, "SELECT ?n WHERE { <http://ex.org/e> <http://ex.org/name> ?n }").unwrap();
    q.to_string_lossy().into_owned()
}

#[test]
fn query_prints_bindings_then_footer() {
    let dir = tempfile::tempdir().unwrap();
    let q = trivial_fixture(dir.path());
    let resolver = format!("fixture:{}", dir.path().display());
    let out = ltqp(&["query", &q, "--resolver", &resolver]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3, "{text}");
    let mut bindings = lines[..2].to_vec();
    bindings.sort();
    assert_eq!(bindings, ["?n=\"a\"", "?n=\"b\""]);
    assert!(lines[2].starts_with("results=2 time_s="), "{}", lines[2]);
    assert!(lines[2].contains(" http=1 retrieved=2 inferred=0"), "{}", lines[2]);
}

#[test]
fn resolver_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let q = trivial_fixture(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_ltqp"))
        .args(["query", &q, "--json", "--setup", "select"])
        .env(ltqp::fetch::RESOLVER_ENV, format!("fixture:{}", dir.path().display()))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let last = stdout(&out).lines().last().unwrap().to_owned();
    let metrics: QueryMetrics = serde_json::from_str(&last).unwrap();
    assert_eq!((metrics.results, metrics.http, metrics.setup), (2, 1, Setup::Select));
}

#[test]
fn bad_query_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("bad.rq");
    std::fs::write(&q, "SELECT ?x WHERE { ?x <http://ex.org/p> }").unwrap();
    let out = ltqp(&["query", q.to_str().unwrap(), "--resolver", "live"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());
}

#[test]
fn unknown_setup_exits_3_listing_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let q = trivial_fixture(dir.path());
    let out = ltqp(&["query", &q, "--setup", "turbo"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    for name in ["base", "select", "seeAlso", "sameAs", "rhoDF", "combined"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn resolver_misconfiguration_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let q = trivial_fixture(dir.path());
    for resolver in ["replay", "ftp:x", "fixture:/nonexistent/dir"] {
        let out = ltqp(&["query", &q, "--resolver", resolver]);
        assert_eq!(out.status.code(), Some(3), "{resolver}: {}", stderr(&out));
    }
    let out = ltqp(&["query", &q, "--resolver", "live", "--parallel", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bench_over_generated_suite() {
    let dir = tempfile::tempdir().unwrap();
    let web = dir.path().join("web");
    let gen = ltqp(&["gen-fixture", "--seed", "4", "--queries-per-class", "1", "--out", web.to_str().unwrap()]);
    assert_eq!(gen.status.code(), Some(0), "{}", stderr(&gen));
    let resolver = format!("fixture:{}", web.display());
    let suite = web.join("suite.tsv");
    let table = dir.path().join("table.csv");
    let out = ltqp(&[
        "bench",
        suite.to_str().unwrap(),
        "--resolver",
        &resolver,
        "--format",
        "csv",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = parse_csv_table(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(rows.len(), 72);
    let raw = parse_metrics_csv(&std::fs::read_to_string(dir.path().join("table.raw.csv")).unwrap()).unwrap();
    assert_eq!(raw.len(), 72);

    let out = ltqp(&[
        "bench",
        suite.to_str().unwrap(),
        "--resolver",
        &resolver,
        "--setups",
        "base,combined",
        "--format",
        "latex",
        "--raw",
        dir.path().join("raw2.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let latex = stdout(&out);
    assert_eq!(latex.matches("\\multicolumn{13}{|l|}{Query class").count(), 12);
    assert_eq!(latex.matches("{\\tt base}").count(), 12);
    assert_eq!(latex.matches("{\\tt combined}").count(), 12);
    assert!(!latex.contains("{\\tt select}"));
    assert!(latex.contains("Query class \\textbf{entity-{so}} with 1 queries"));
}

#[test]
fn bench_manifest_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("suite.tsv");
    std::fs::write(&manifest, "just-an-id-without-path\n").unwrap();
    let out = ltqp(&["bench", manifest.to_str().unwrap(), "--resolver", "live"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(dir.path().join("q.rq"), "SELECT nonsense").unwrap();
    std::fs::write(&manifest, "q1\tq.rq\n").unwrap();
    let out = ltqp(&["bench", manifest.to_str().unwrap(), "--resolver", "live"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn record_then_replay_over_loopback() {
    let dir = tempfile::tempdir().unwrap();
    let web = dir.path().join("web");
    let server = common::LocalServer::bind();
    let gen = ltqp(&[
        "gen-fixture",
        "--seed",
        "2",
        "--queries-per-class",
        "1",
        "--base",
        &server.base,
        "--out",
        web.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0), "{}", stderr(&gen));
    server.serve(&web);
    let suite = web.join("suite.tsv");
    let archive = dir.path().join("run.archive");
    let rec = ltqp(&[
        "record",
        suite.to_str().unwrap(),
        "--archive",
        archive.to_str().unwrap(),
        "--setups",
        "select,combined",
        "--politeness-ms",
        "1",
    ]);
    assert_eq!(rec.status.code(), Some(0), "{}", stderr(&rec));
    let replay = |raw: &str| {
        let raw = dir.path().join(raw);
        let out = ltqp(&[
            "bench",
            suite.to_str().unwrap(),
            "--setups",
            "select,combined",
            "--resolver",
            &format!("replay:{}", archive.display()),
            "--raw",
            raw.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        parse_metrics_csv(&std::fs::read_to_string(raw).unwrap())
            .unwrap()
            .into_iter()
            .map(|m| (m.query_id, m.setup, m.results, m.http, m.retrieved, m.inferred))
            .collect::<Vec<_>>()
    };
    let (a, b) = (replay("a.csv"), replay("b.csv"));
    assert_eq!(a.len(), 24);
    assert_eq!(a, b);
    assert!(a.iter().any(|r| r.2 > 0));
}

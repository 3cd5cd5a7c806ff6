mod common;

use std::sync::atomic::Ordering;
use std::sync::Arc;
use std::time::Duration;

use ltqp::fetch::{DerefStatus, FetchConfig, Fetcher, Hop, LiveTransport, ResolverMode, SystemClock, Transport};
use ltqp::rdf::Iri;

fn serve(entries: &[(&str, &str)]) -> (String, Arc<std::sync::atomic::AtomicUsize>, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let server = common::LocalServer::bind();
    let base = server.base.clone();
    let owned: Vec<(String, String)> = entries
        .iter()
        .map(|(i, b)| (format!("{base}{i}"), b.replace("BASE/", &base)))
        .collect();
    let refs: Vec<(&str, &str)> = owned.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    common::write_web(dir.path(), &refs);
    let hits = server.serve(dir.path());
    (base, hits, dir)
}

#[test]
fn live_hops() {
    let (base, _, _dir) = serve(&[
        ("doc", "<BASE/doc> <BASE/p> \"x\" .\n"),
        ("moved", "@REDIRECT BASE/doc"),
        ("gone", "@STATUS 410"),
    ]);
    let t = LiveTransport::new();
    let timeout = Duration::from_secs(5);
    match t.lookup(&format!("{base}doc"), timeout) {
        Hop::Body(body) => assert!(String::from_utf8(body).unwrap().contains("\"x\"")),
        other => panic!("{other:?}"),
    }
    match t.lookup(&format!("{base}moved"), timeout) {
        Hop::Redirect(303, to) => assert_eq!(to, format!("{base}doc")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(t.lookup(&format!("{base}gone"), timeout), Hop::Status(410)));
    assert!(matches!(t.lookup(&format!("{base}nothing"), timeout), Hop::Status(404)));
    assert!(t.is_network());
}

#[test]
fn live_fetcher_follows_redirects_and_caches() {
    let (base, hits, _dir) = serve(&[("doc", "<BASE/doc> <BASE/p> \"x\" .\n"), ("moved", "@REDIRECT BASE/doc")]);
    let config = FetchConfig {
        politeness: Duration::from_millis(1),
        ..FetchConfig::with_resolver(ResolverMode::Live)
    };
    let fetcher = Fetcher::new(config, Arc::new(SystemClock::new())).unwrap();
    let moved = Iri::new(format!("{base}moved#frag")).unwrap();
    let r = fetcher.dereference(&moved);
    assert!(matches!(r.status, DerefStatus::Ok(_)), "{:?}", r.status);
    assert_eq!(r.final_iri.as_str(), format!("{base}doc"));
    fetcher.dereference(&moved);
    assert_eq!(fetcher.lookups(), 2);
    assert_eq!(hits.load(Ordering::SeqCst), 2);
}

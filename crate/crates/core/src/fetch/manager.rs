use std::collections::HashMap;
use std::io;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Duration;

use log::{debug, warn};
use thiserror::Error;

use super::archive::{RecordingTransport, ReplayTransport};
use super::clock::Clock;
use super::config::{ConfigError, FetchConfig, ResolverMode};
use super::fixture::{FixtureError, FixtureTransport, FixtureWeb};
use super::live::LiveTransport;
use super::transport::{Hop, Transport};
use crate::rdf::{Document, Iri, ParseError};

#[derive(Debug, Clone)]
pub enum DerefStatus {
    Ok(Document),
    HttpError(u16),
    Timeout,
    TooManyRedirects,
    ParseFailure,
    /// Not attempted: budget or deadline exhausted.
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct DerefResult {
    /// The fragment-free IRI that was looked up.
    pub requested: Iri,
    pub final_iri: Iri,
    pub status: DerefStatus,
    pub redirects: Vec<Iri>,
    pub elapsed: Duration,
    pub lookups: u32,
    pub parse_errors: Vec<ParseError>,
}

impl DerefResult {
    pub fn document(&self) -> Option<&Document> {
        match &self.status {
            DerefStatus::Ok(doc) => Some(doc),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum FetchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Fixture(#[from] FixtureError),
    #[error("cannot open archive {path}: {source}")]
    Archive {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Builds the transport selected by `config.resolver`.
pub fn build_transport(config: &FetchConfig, clock: Arc<dyn Clock>) -> Result<Arc<dyn Transport>, FetchError> {
    config.validate()?;
    let archive_err = |path: &PathBuf| {
        let path = path.clone();
        move |source| FetchError::Archive { path, source }
    };
    Ok(match &config.resolver {
        ResolverMode::Live => Arc::new(LiveTransport::new()),
        ResolverMode::Fixture(dir) => Arc::new(FixtureTransport::new(FixtureWeb::load(dir)?, clock)),
        ResolverMode::Replay(path) => Arc::new(ReplayTransport::open(path).map_err(archive_err(path))?),
        ResolverMode::Record(path) => Arc::new(
            RecordingTransport::create(Arc::new(LiveTransport::new()), path).map_err(archive_err(path))?,
        ),
    })
}

/// Spaces out requests to the same host.
#[derive(Debug, Default)]
struct HostGate {
    next_slot: Mutex<HashMap<String, Duration>>,
}

impl HostGate {
    fn wait(&self, host: &str, gap: Duration, clock: &dyn Clock) {
        let now = clock.elapsed();
        let slot = {
            let mut slots = self.next_slot.lock().unwrap();
            let slot = slots.get(host).copied().unwrap_or(now).max(now);
            slots.insert(host.to_owned(), slot + gap);
            slot
        };
        if slot > now {
            clock.sleep(slot - now);
        }
    }
}

type CacheCell = Arc<OnceLock<Arc<DerefResult>>>;

/// Per-query dereference manager: cache, lookup budget, deadline and
/// traffic counters. Shared by the traversal workers.
#[derive(Debug)]
pub struct Fetcher {
    config: FetchConfig,
    transport: Arc<dyn Transport>,
    clock: Arc<dyn Clock>,
    started: Duration,
    cache: Mutex<HashMap<Iri, CacheCell>>,
    lookups: AtomicU32,
    retrieved: AtomicU64,
    budget_hit: AtomicBool,
    deadline_hit: AtomicBool,
    hosts: HostGate,
}

impl Fetcher {
    pub fn new(config: FetchConfig, clock: Arc<dyn Clock>) -> Result<Self, FetchError> {
        let transport = build_transport(&config, clock.clone())?;
        Ok(Self::with_transport(config, transport, clock))
    }

    pub fn with_transport(config: FetchConfig, transport: Arc<dyn Transport>, clock: Arc<dyn Clock>) -> Self {
        Fetcher {
            started: clock.elapsed(),
            config,
            transport,
            clock,
            cache: Mutex::default(),
            lookups: AtomicU32::new(0),
            retrieved: AtomicU64::new(0),
            budget_hit: AtomicBool::new(false),
            deadline_hit: AtomicBool::new(false),
            hosts: HostGate::default(),
        }
    }

    pub fn config(&self) -> &FetchConfig {
        &self.config
    }

    /// Lookups attempted so far, redirect hops and failures included.
    pub fn lookups(&self) -> u32 {
        self.lookups.load(Ordering::SeqCst)
    }

    /// Triples parsed from successfully retrieved documents.
    pub fn retrieved_triples(&self) -> u64 {
        self.retrieved.load(Ordering::SeqCst)
    }

    pub fn budget_exhausted(&self) -> bool {
        self.budget_hit.load(Ordering::SeqCst)
    }

    pub fn deadline_exceeded(&self) -> bool {
        self.deadline_hit.load(Ordering::SeqCst) || self.remaining().is_zero()
    }

    /// Time left before the query deadline.
    pub fn remaining(&self) -> Duration {
        let spent = self.clock.elapsed().saturating_sub(self.started);
        self.config.query_deadline.saturating_sub(spent)
    }

    /// Dereferences `iri` without its fragment. Each document is looked up
    /// at most once; later calls return the cached result.
    pub fn dereference(&self, iri: &Iri) -> Arc<DerefResult> {
        let key = iri.without_fragment();
        let cell = self.cache.lock().unwrap().entry(key.clone()).or_default().clone();
        cell.get_or_init(|| Arc::new(self.fetch(key))).clone()
    }

    fn reserve_lookup(&self) -> bool {
        let max = self.config.max_lookups;
        let ok = self
            .lookups
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| (n < max).then_some(n + 1))
            .is_ok();
        if !ok {
            self.budget_hit.store(true, Ordering::SeqCst);
        }
        ok
    }

    fn fetch(&self, requested: Iri) -> DerefResult {
        let t0 = self.clock.elapsed();
        let mut current = requested.clone();
        let mut redirects = Vec::new();
        let mut lookups = 0;
        let finish = |status, current: Iri, redirects, lookups, parse_errors| DerefResult {
            requested: requested.clone(),
            final_iri: current,
            status,
            redirects,
            elapsed: self.clock.elapsed().saturating_sub(t0),
            lookups,
            parse_errors,
        };
        loop {
            let remaining = self.remaining();
            if remaining.is_zero() {
                self.deadline_hit.store(true, Ordering::SeqCst);
                return finish(DerefStatus::Skipped("query deadline reached".into()), current, redirects, lookups, vec![]);
            }
            if !self.reserve_lookup() {
                return finish(DerefStatus::Skipped("lookup budget exhausted".into()), current, redirects, lookups, vec![]);
            }
            lookups += 1;
            if self.transport.is_network() {
                if let Some(host) = current.host() {
                    self.hosts.wait(host, self.config.politeness, self.clock.as_ref());
                }
            }
            let timeout = self.config.lookup_timeout.min(remaining);
            match self.transport.lookup(current.as_str(), timeout) {
                Hop::Body(body) => {
                    let (doc, errors) = Document::parse(current.clone(), &body);
                    for e in &errors {
                        debug!("{}:{}: {}", current, e.line, e.reason);
                    }
                    if doc.triples.is_empty() && !errors.is_empty() {
                        return finish(DerefStatus::ParseFailure, current, redirects, lookups, errors);
                    }
                    self.retrieved.fetch_add(doc.triples.len() as u64, Ordering::SeqCst);
                    return finish(DerefStatus::Ok(doc), current, redirects, lookups, errors);
                }
                Hop::Redirect(code, location) => {
                    let Some(target) = resolve_location(&current, &location) else {
                        warn!("{current}: unusable Location {location:?}");
                        return finish(DerefStatus::HttpError(code), current, redirects, lookups, vec![]);
                    };
                    if redirects.len() >= self.config.redirect_limit as usize {
                        return finish(DerefStatus::TooManyRedirects, current, redirects, lookups, vec![]);
                    }
                    redirects.push(target.clone());
                    current = target;
                }
                Hop::Status(code) => return finish(DerefStatus::HttpError(code), current, redirects, lookups, vec![]),
                Hop::Timeout => return finish(DerefStatus::Timeout, current, redirects, lookups, vec![]),
            }
        }
    }
}

fn resolve_location(base: &Iri, location: &str) -> Option<Iri> {
    let joined = url::Url::parse(base.as_str()).ok()?.join(location).ok()?;
    Iri::new(joined.as_str()).ok().map(|i| i.without_fragment())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fetch::clock::{ManualClock, SystemClock};
    use crate::fetch::fixture::MANIFEST_FILE;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn fixture(manifest: &str, files: &[(&str, &str)]) -> (tempfile::TempDir, FetchConfig) {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(MANIFEST_FILE), manifest).unwrap();
        for (name, body) in files {
            std::fs::write(dir.path().join(name), body).unwrap();
        }
        let cfg = FetchConfig::with_resolver(ResolverMode::Fixture(dir.path().to_path_buf()));
        (dir, cfg)
    }

    fn five_triples() -> String {
        (0..5).map(|i| format!("<http://a.org/e> <http://a.org/p> \"v{i}\" .\n")).collect()
    }

    #[test]
    fn five_triple_document_costs_one_lookup() {
        let body = five_triples();
        let (_dir, cfg) = fixture("http://a.org/e\tFILE e.nt\n", &[("e.nt", &body)]);
        let f = Fetcher::new(cfg, Arc::new(SystemClock::new())).unwrap();
        let r = f.dereference(&iri("http://a.org/e"));
        assert_eq!(r.document().unwrap().triples.len(), 5);
        assert_eq!(r.lookups, 1);
        assert_eq!(f.retrieved_triples(), 5);
    }

    #[test]
    fn cache_hits_and_fragments_cost_nothing() {
        let body = five_triples();
        let (_dir, cfg) = fixture("http://a.org/e\tFILE e.nt\n", &[("e.nt", &body)]);
        let f = Fetcher::new(cfg, Arc::new(SystemClock::new())).unwrap();
        f.dereference(&iri("http://a.org/e"));
        f.dereference(&iri("http://a.org/e"));
        f.dereference(&iri("http://a.org/e#me"));
        assert_eq!(f.lookups(), 1);
        assert_eq!(f.retrieved_triples(), 5);
    }

    #[test]
    fn redirect_chain_over_limit() {
        let manifest = "http://a.org/r1\tREDIRECT http://a.org/r2\n\
                        http://a.org/r2\tREDIRECT http://a.org/r3\n\
                        http://a.org/r3\tREDIRECT http://a.org/e\n\
                        http://a.org/e\tFILE e.nt\n";
        let body = five_triples();
        let (_dir, mut cfg) = fixture(manifest, &[("e.nt", &body)]);
        cfg.redirect_limit = 2;
        let f = Fetcher::new(cfg.clone(), Arc::new(SystemClock::new())).unwrap();
        let r = f.dereference(&iri("http://a.org/r1"));
        assert!(matches!(r.status, DerefStatus::TooManyRedirects));
        assert_eq!(r.lookups, 3);
        assert_eq!(f.lookups(), 3);
        assert!(r.redirects.len() <= 2);

        cfg.redirect_limit = 3;
        let f = Fetcher::new(cfg, Arc::new(SystemClock::new())).unwrap();
        let r = f.dereference(&iri("http://a.org/r1"));
        assert_eq!(r.final_iri, iri("http://a.org/e"));
        assert_eq!(r.lookups, 4);
    }

    #[test]
    fn status_and_missing_and_parse_failure() {
        let (_dir, cfg) = fixture(
            "http://a.org/x\tSTATUS 503\nhttp://a.org/bad\tFILE bad.nt\n",
            &[("bad.nt", "not n-triples\n")],
        );
        let f = Fetcher::new(cfg, Arc::new(SystemClock::new())).unwrap();
        assert!(matches!(f.dereference(&iri("http://a.org/x")).status, DerefStatus::HttpError(503)));
        assert!(matches!(f.dereference(&iri("http://a.org/nope")).status, DerefStatus::HttpError(404)));
        let bad = f.dereference(&iri("http://a.org/bad"));
        assert!(matches!(bad.status, DerefStatus::ParseFailure));
        assert_eq!(bad.parse_errors.len(), 1);
        assert_eq!(f.lookups(), 3);
    }

    #[test]
    fn budget_is_never_exceeded() {
        let manifest: String = (0..5).map(|i| format!("http://a.org/{i}\tSTATUS 404\n")).collect();
        let (_dir, mut cfg) = fixture(&manifest, &[]);
        cfg.max_lookups = 3;
        let f = Fetcher::new(cfg, Arc::new(SystemClock::new())).unwrap();
        let skipped = (0..5)
            .map(|i| f.dereference(&iri(&format!("http://a.org/{i}"))))
            .filter(|r| matches!(r.status, DerefStatus::Skipped(_)))
            .count();
        assert_eq!(skipped, 2);
        assert_eq!(f.lookups(), 3);
        assert!(f.budget_exhausted());
    }

    #[test]
    fn deadline_caps_the_lookup_timeout() {
        let (_dir, mut cfg) = fixture("http://a.org/s\tDELAY 5000 THEN STATUS 404\n", &[]);
        cfg.query_deadline = Duration::from_secs(2);
        let clock = Arc::new(ManualClock::new());
        let f = Fetcher::new(cfg, clock.clone()).unwrap();
        let r = f.dereference(&iri("http://a.org/s"));
        assert!(matches!(r.status, DerefStatus::Timeout));
        assert_eq!(clock.elapsed(), Duration::from_secs(2));
        assert!(f.deadline_exceeded());
        let r = f.dereference(&iri("http://a.org/other"));
        assert!(matches!(r.status, DerefStatus::Skipped(_)));
        assert_eq!(r.lookups, 0);
    }

    #[test]
    fn politeness_spaces_network_requests() {
        #[derive(Debug)]
        struct Net;
        impl Transport for Net {
            fn lookup(&self, _: &str, _: Duration) -> Hop {
                Hop::Status(404)
            }
            fn is_network(&self) -> bool {
                true
            }
        }
        let clock = Arc::new(ManualClock::new());
        let f = Fetcher::with_transport(FetchConfig::default(), Arc::new(Net), clock.clone());
        f.dereference(&iri("http://a.org/1"));
        f.dereference(&iri("http://a.org/2"));
        f.dereference(&iri("http://b.org/1"));
        assert_eq!(clock.elapsed(), Duration::from_millis(500));
    }

    #[test]
    fn relative_location() {
        assert_eq!(resolve_location(&iri("http://a.org/x/y"), "../z#f"), Some(iri("http://a.org/z")));
    }
}

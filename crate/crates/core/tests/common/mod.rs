#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use ltqp::bench::{AggregateRow, Stat};
use ltqp::engine::{Engine, Setup};
use ltqp::query::QueryClass;
use ltqp::fetch::{Clock, FetchConfig, FixtureTransport, FixtureWeb, ResolverMode, MANIFEST_FILE};

/// Writes a fixture web. Entries are `(iri, body)`; a body starting with
/// `@` is a raw manifest directive such as `@DELAY 5000 THEN FILE x.nt`.
pub fn write_web(dir: &Path, entries: &[(&str, &str)]) {
    let mut manifest = String::new();
    for (i, (iri, body)) in entries.iter().enumerate() {
        if let Some(directive) = body.strip_prefix('@') {
            manifest.push_str(&format!("{iri}\t{directive}\n"));
        } else {
            let file = format!("d{i}.nt");
            std::fs::write(dir.join(&file), body).unwrap();
            manifest.push_str(&format!("{iri}\tFILE {file}\n"));
        }
    }
    std::fs::write(dir.join(MANIFEST_FILE), manifest).unwrap();
}

pub fn fixture_config(dir: &Path) -> FetchConfig {
    FetchConfig::with_resolver(ResolverMode::Fixture(dir.to_path_buf()))
}

pub fn engine_with_clock(dir: &Path, clock: Arc<dyn Clock>) -> Engine {
    let web = FixtureWeb::load(dir).unwrap();
    Engine::with_transport(fixture_config(dir), Arc::new(FixtureTransport::new(web, clock.clone())), clock)
}

fn st(mean: f64, sd: f64) -> Stat {
    Stat { mean, sd }
}

/// The entity-s block of the published table: per setup, (mean, sd) for
/// Results, Time, First, HTTP, Retrieved (k), Inferred (k).
pub fn entity_s_block() -> Vec<AggregateRow> {
    let cells: [(Setup, [(f64, f64); 6]); 6] = [
        (Setup::Base, [(10.68, 10.2), (7.97, 11.52), (1.02, 1.98), (17.72, 16.95), (3.41, 10.59), (0.0, 0.0)]),
        (Setup::Select, [(10.67, 10.2), (4.08, 11.81), (1.49, 6.55), (5.33, 11.93), (2.26, 10.30), (0.0, 0.0)]),
        (Setup::SeeAlso, [(10.67, 10.2), (3.36, 7.66), (1.03, 2.53), (5.52, 11.97), (2.26, 10.30), (0.0, 0.0)]),
        (Setup::SameAs, [(14.72, 24.98), (7.27, 25.92), (0.88, 1.5), (13.96, 59.97), (10.81, 40.36), (8.16, 45.10)]),
        (Setup::RhoDf, [(15.73, 11.97), (3.48, 9.13), (0.85, 1.21), (7.25, 12.99), (4.91, 18.90), (4.05, 19.79)]),
        (Setup::Combined, [(21.66, 40.18), (33.22, 220.89), (1.14, 1.81), (16.75, 67.43), (24.13, 87.03), (33.70, 220.28)]),
    ];
    cells
        .into_iter()
        .map(|(setup, c)| AggregateRow {
            class: QueryClass::EntityS,
            class_queries: 79,
            setup,
            rows: 79,
            results: st(c[0].0, c[0].1),
            time_s: st(c[1].0, c[1].1),
            first_s: Some(st(c[2].0, c[2].1)),
            http: st(c[3].0, c[3].1),
            retrieved_k: st(c[4].0, c[4].1),
            inferred_k: st(c[5].0, c[5].1),
            truncated: 0,
        })
        .collect()
}

pub const PUBLISHED: &str = r"\multicolumn{13}{|l|}{Query class \textbf{entity-{s}} with 79 queries}\\\hline
{\tt base}& 10.68&($\pm$10.2)& 7.97&($\pm$11.52)& 1.02&($\pm$1.98)& 17.72&($\pm$16.95)& 3.41&($\pm$10.59)& 0&($\pm$0)\\
{\tt select}& 10.67&($\pm$10.2)& 4.08&($\pm$11.81)& 1.49&($\pm$6.55)& 5.33&($\pm$11.93)& 2.26&($\pm$10.30)& 0&($\pm$0)\\
{\tt seeAlso}& 10.67&($\pm$10.2)& 3.36&($\pm$7.66)& 1.03&($\pm$2.53)& 5.52&($\pm$11.97)& 2.26&($\pm$10.30)& 0&($\pm$0)\\
{\tt sameAs}& 14.72&($\pm$24.98)& 7.27&($\pm$25.92)& 0.88&($\pm$1.5)& 13.96&($\pm$59.97)& 10.81&($\pm$40.36)& 8.16&($\pm$45.10)\\
{\tt $\rho$DF}& 15.73&($\pm$11.97)& 3.48&($\pm$9.13)& 0.85&($\pm$1.21)& 7.25&($\pm$12.99)& 4.91&($\pm$18.90)& 4.05&($\pm$19.79)\\
{\tt combined}& 21.66&($\pm$40.18)& 33.22&($\pm$220.89)& 1.14&($\pm$1.81)& 16.75&($\pm$67.43)& 24.13&($\pm$87.03)& 33.70&($\pm$220.28)\\
";

/// A loopback HTTP server answering from a fixture manifest, for tests of
/// the live transport. The port is bound first so fixture IRIs can name it.
pub struct LocalServer {
    listener: std::net::TcpListener,
    pub base: String,
}

impl LocalServer {
    pub fn bind() -> LocalServer {
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let base = format!("http://127.0.0.1:{}/", listener.local_addr().unwrap().port());
        LocalServer { listener, base }
    }

    /// Serves `dir` until the process exits. Returns a request counter.
    pub fn serve(self, dir: &Path) -> Arc<std::sync::atomic::AtomicUsize> {
        let web = Arc::new(FixtureWeb::load(dir).unwrap());
        let hits = Arc::new(std::sync::atomic::AtomicUsize::new(0));
        let counter = hits.clone();
        let origin = self.base.trim_end_matches('/').to_owned();
        std::thread::spawn(move || {
            for stream in self.listener.incoming() {
                let Ok(stream) = stream else { continue };
                let (web, origin) = (web.clone(), origin.clone());
                counter.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                std::thread::spawn(move || respond(stream, &web, &origin));
            }
        });
        hits
    }
}

fn respond(mut stream: std::net::TcpStream, web: &FixtureWeb, origin: &str) {
    use std::io::{BufRead, BufReader, Write};
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request = String::new();
    if reader.read_line(&mut request).is_err() {
        return;
    }
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).unwrap_or(0) == 0 || line == "\r\n" {
            break;
        }
    }
    let path = request.split_whitespace().nth(1).unwrap_or("/");
    let mut resolution = web.resolve(&format!("{origin}{path}"));
    while let ltqp::fetch::Resolution::Delay(d, inner) = resolution {
        std::thread::sleep(d);
        resolution = *inner;
    }
    let (status, extra, body) = match resolution {
        ltqp::fetch::Resolution::File(p) => (200, String::new(), std::fs::read(p).unwrap()),
        ltqp::fetch::Resolution::Redirect(to) => (303, format!("Location: {to}\r\n"), Vec::new()),
        ltqp::fetch::Resolution::Status(code) => (code, String::new(), Vec::new()),
        _ => (404, String::new(), Vec::new()),
    };
    let head = format!(
        "HTTP/1.1 {status} X\r\nContent-Type: application/n-triples\r\nContent-Length: {}\r\nConnection: close\r\n{extra}\r\n",
        body.len()
    );
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(&body);
}

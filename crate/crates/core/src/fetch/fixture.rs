//! Local fixture webs.
//!
//! A fixture directory holds `manifest.tsv`, one entry per line:
//!
//! ```text
//! IRI <TAB> FILE path
//! IRI <TAB> REDIRECT iri
//! IRI <TAB> STATUS code
//! IRI <TAB> DELAY ms THEN <any of the above>
//! ```
//!
//! Paths are relative to the directory. Blank lines and lines starting
//! with `#` are ignored. IRIs missing from the manifest resolve to 404.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use log::warn;
use thiserror::Error;

use super::clock::Clock;
use super::transport::{Hop, Transport};

pub const MANIFEST_FILE: &str = "manifest.tsv";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read fixture manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Manifest { path: PathBuf, line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    File(PathBuf),
    Redirect(String),
    Status(u16),
    Delay(Duration, Box<Resolution>),
    NotFound,
}

impl Resolution {
    fn parse(spec: &str) -> Result<Resolution, String> {
        let (verb, rest) = spec.trim().split_once(' ').ok_or_else(|| format!("malformed entry {spec:?}"))?;
        let rest = rest.trim();
        match verb {
            "FILE" if !rest.is_empty() => Ok(Resolution::File(PathBuf::from(rest))),
            "REDIRECT" if !rest.is_empty() => Ok(Resolution::Redirect(rest.to_owned())),
            "STATUS" => rest
                .parse::<u16>()
                .map(Resolution::Status)
                .map_err(|_| format!("bad status code {rest:?}")),
            "DELAY" => {
                let (ms, then) = rest.split_once(" THEN ").ok_or("DELAY needs 'ms THEN ...'")?;
                let ms: u64 = ms.trim().parse().map_err(|_| format!("bad delay {ms:?}"))?;
                Ok(Resolution::Delay(Duration::from_millis(ms), Box::new(Resolution::parse(then)?)))
            }
            _ => Err(format!("unknown entry {spec:?}")),
        }
    }
}

/// A loaded fixture manifest.
#[derive(Debug, Clone)]
pub struct FixtureWeb {
    root: PathBuf,
    entries: HashMap<String, Resolution>,
}

impl FixtureWeb {
    pub fn load(root: impl AsRef<Path>) -> Result<Self, FixtureError> {
        let root = root.as_ref().to_path_buf();
        let path = root.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|source| FixtureError::Io {
            path: path.clone(),
            source,
        })?;
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| FixtureError::Manifest {
                path: path.clone(),
                line: idx + 1,
                reason,
            };
            let (iri, spec) = line.split_once('\t').ok_or_else(|| err("expected IRI<TAB>entry".into()))?;
            let resolution = Resolution::parse(spec).map_err(err)?;
            entries.entry(iri.trim().to_owned()).or_insert(resolution);
        }
        Ok(FixtureWeb { root, entries })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Resolution for `iri`, with file paths made absolute.
    pub fn resolve(&self, iri: &str) -> Resolution {
        fn absolutize(root: &Path, r: &Resolution) -> Resolution {
            match r {
                Resolution::File(p) => Resolution::File(root.join(p)),
                Resolution::Delay(d, inner) => Resolution::Delay(*d, Box::new(absolutize(root, inner))),
                other => other.clone(),
            }
        }
        match self.entries.get(iri) {
            Some(r) => absolutize(&self.root, r),
            None => Resolution::NotFound,
        }
    }

    pub fn iris(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// Looks `iri` up in the manifest under `fixture_root`.
pub fn resolve_fixture(iri: &str, fixture_root: impl AsRef<Path>) -> Result<Resolution, FixtureError> {
    Ok(FixtureWeb::load(fixture_root)?.resolve(iri))
}

/// Serves lookups from a [`FixtureWeb`]. `DELAY` entries sleep on the clock.
#[derive(Debug)]
pub struct FixtureTransport {
    web: FixtureWeb,
    clock: Arc<dyn Clock>,
}

impl FixtureTransport {
    pub fn new(web: FixtureWeb, clock: Arc<dyn Clock>) -> Self {
        FixtureTransport { web, clock }
    }

    fn serve(&self, resolution: Resolution, timeout: Duration) -> Hop {
        match resolution {
            Resolution::File(path) => match std::fs::read(&path) {
                Ok(body) => Hop::Body(body),
                Err(err) => {
                    warn!("fixture file {} unreadable: {err}", path.display());
                    Hop::Status(500)
                }
            },
            Resolution::Redirect(target) => Hop::Redirect(303, target),
            Resolution::Status(code) => Hop::Status(code),
            Resolution::NotFound => Hop::Status(404),
            Resolution::Delay(delay, inner) => {
                if delay >= timeout {
                    self.clock.sleep(timeout);
                    Hop::Timeout
                } else {
                    self.clock.sleep(delay);
                    self.serve(*inner, timeout - delay)
                }
            }
        }
    }
}

impl Transport for FixtureTransport {
    fn lookup(&self, iri: &str, timeout: Duration) -> Hop {
        self.serve(self.web.resolve(iri), timeout)
    }
}

//! Record/replay archives.
//!
//! An archive is a sequence of records, one per request attempt:
//!
//! ```text
//! u32 BE length | requested IRI (UTF-8)
//! u32 BE length | final IRI (UTF-8; the Location target for redirects)
//! u16 BE        | status code (0 = timeout)
//! u32 BE length | body bytes
//! ```
//!
//! Records are appended as they happen. Replay serves the first record for
//! each requested IRI, so the same archive and request sequence always give
//! the same answers.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use log::warn;

use super::transport::{Hop, Transport};

pub const TIMEOUT_STATUS: u16 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiveRecord {
    pub iri: String,
    pub final_iri: String,
    pub status: u16,
    pub body: Vec<u8>,
}

impl ArchiveRecord {
    pub fn from_hop(iri: &str, hop: &Hop) -> Self {
        let (final_iri, status, body) = match hop {
            Hop::Body(body) => (iri.to_owned(), 200, body.clone()),
            Hop::Redirect(code, target) => (target.clone(), *code, Vec::new()),
            Hop::Status(code) => (iri.to_owned(), *code, Vec::new()),
            Hop::Timeout => (iri.to_owned(), TIMEOUT_STATUS, Vec::new()),
        };
        ArchiveRecord {
            iri: iri.to_owned(),
            final_iri,
            status,
            body,
        }
    }

    pub fn to_hop(&self) -> Hop {
        match self.status {
            TIMEOUT_STATUS => Hop::Timeout,
            200..=299 => Hop::Body(self.body.clone()),
            300..=399 if self.final_iri != self.iri => Hop::Redirect(self.status, self.final_iri.clone()),
            code => Hop::Status(code),
        }
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        let field = |w: &mut dyn Write, bytes: &[u8]| -> io::Result<()> {
            let len = u32::try_from(bytes.len()).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "field too large"))?;
            w.write_all(&len.to_be_bytes())?;
            w.write_all(bytes)
        };
        field(w, self.iri.as_bytes())?;
        field(w, self.final_iri.as_bytes())?;
        w.write_all(&self.status.to_be_bytes())?;
        field(w, &self.body)
    }

    /// Reads one record; `Ok(None)` at a clean end of input.
    pub fn read_from(r: &mut impl Read) -> io::Result<Option<Self>> {
        fn len(r: &mut impl Read) -> io::Result<Option<usize>> {
            let mut buf = [0u8; 4];
            match r.read_exact(&mut buf) {
                Ok(()) => Ok(Some(u32::from_be_bytes(buf) as usize)),
                Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Ok(None),
                Err(e) => Err(e),
            }
        }
        fn bytes(r: &mut impl Read) -> io::Result<Vec<u8>> {
            let n = len(r)?.ok_or_else(|| io::Error::new(io::ErrorKind::UnexpectedEof, "truncated record"))?;
            let mut buf = Vec::new();
            r.take(n as u64).read_to_end(&mut buf)?;
            if buf.len() != n {
                return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated record"));
            }
            Ok(buf)
        }
        let utf8 = |b: Vec<u8>| String::from_utf8(b).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e));
        let Some(n) = len(r)? else { return Ok(None) };
        let mut iri = Vec::new();
        r.take(n as u64).read_to_end(&mut iri)?;
        if iri.len() != n {
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, "truncated record"));
        }
        let final_iri = utf8(bytes(r)?)?;
        let mut status = [0u8; 2];
        r.read_exact(&mut status)?;
        let body = bytes(r)?;
        Ok(Some(ArchiveRecord {
            iri: utf8(iri)?,
            final_iri,
            status: u16::from_be_bytes(status),
            body,
        }))
    }
}

pub fn read_archive(path: impl AsRef<Path>) -> io::Result<Vec<ArchiveRecord>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    while let Some(rec) = ArchiveRecord::read_from(&mut r)? {
        out.push(rec);
    }
    Ok(out)
}

/// Serves lookups solely from an archive.
#[derive(Debug)]
pub struct ReplayTransport {
    records: HashMap<String, ArchiveRecord>,
}

impl ReplayTransport {
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::from_records(read_archive(path)?))
    }

    pub fn from_records(records: impl IntoIterator<Item = ArchiveRecord>) -> Self {
        let mut map = HashMap::new();
        for rec in records {
            map.entry(rec.iri.clone()).or_insert(rec);
        }
        ReplayTransport { records: map }
    }
}

impl Transport for ReplayTransport {
    fn lookup(&self, iri: &str, _timeout: Duration) -> Hop {
        match self.records.get(iri) {
            Some(rec) => rec.to_hop(),
            None => {
                warn!("replay miss: {iri} is not in the archive");
                Hop::Status(404)
            }
        }
    }
}

/// Wraps another transport and appends every exchange to an archive.
#[derive(Debug)]
pub struct RecordingTransport {
    inner: Arc<dyn Transport>,
    path: PathBuf,
    out: Mutex<File>,
}

impl RecordingTransport {
    pub fn create(inner: Arc<dyn Transport>, path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let out = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(RecordingTransport {
            inner,
            path,
            out: Mutex::new(out),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Transport for RecordingTransport {
    fn lookup(&self, iri: &str, timeout: Duration) -> Hop {
        let hop = self.inner.lookup(iri, timeout);
        let mut buf = Vec::new();
        ArchiveRecord::from_hop(iri, &hop)
            .write_to(&mut buf)
            .expect("writing to a Vec cannot fail");
        let mut out = self.out.lock().unwrap();
        if let Err(err) = out.write_all(&buf).and_then(|()| out.flush()) {
            warn!("cannot append to archive {}: {err}", self.path.display());
        }
        hop
    }

    fn is_network(&self) -> bool {
        self.inner.is_network()
    }
}

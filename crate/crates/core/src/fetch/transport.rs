use std::fmt::Debug;
use std::time::Duration;

/// Outcome of a single request, before redirects are followed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hop {
    Body(Vec<u8>),
    /// Status code and `Location` target, possibly relative.
    Redirect(u16, String),
    Status(u16),
    Timeout,
}

/// Performs one lookup of a fragment-free IRI.
pub trait Transport: Send + Sync + Debug {
    fn lookup(&self, iri: &str, timeout: Duration) -> Hop;

    /// Whether requests leave the process; per-host politeness applies only then.
    fn is_network(&self) -> bool {
        false
    }
}

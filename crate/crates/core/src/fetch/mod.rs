//! Dereferencing: live HTTP, fixture directories and record/replay archives.

mod archive;
mod clock;
mod config;
mod fixture;
mod live;
mod manager;
mod transport;

pub use archive::{read_archive, ArchiveRecord, RecordingTransport, ReplayTransport};
pub use clock::{Clock, ManualClock, SystemClock};
pub use config::{ConfigError, FetchConfig, ResolverMode, RESOLVER_ENV};
pub use fixture::{resolve_fixture, FixtureError, FixtureTransport, FixtureWeb, Resolution, MANIFEST_FILE};
pub use live::{LiveTransport, ACCEPT};
pub use manager::{build_transport, DerefResult, DerefStatus, FetchError, Fetcher};
pub use transport::{Hop, Transport};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

/// Environment variable that overrides the default resolver mode.
pub const RESOLVER_ENV: &str = "LTQP_RESOLVER";

/// Where dereferenced documents come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolverMode {
    Live,
    /// A directory holding `manifest.tsv` and the documents it names.
    Fixture(PathBuf),
    /// Serve solely from a recorded archive.
    Replay(PathBuf),
    /// Fetch live and append every exchange to an archive.
    Record(PathBuf),
}

impl ResolverMode {
    /// Reads [`RESOLVER_ENV`], if set.
    pub fn from_env() -> Option<Result<Self, ConfigError>> {
        std::env::var(RESOLVER_ENV).ok().map(|v| v.parse())
    }
}

impl FromStr for ResolverMode {
    type Err = ConfigError;

    /// `live`, `fixture:DIR`, `replay:FILE` or `record:FILE`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, path) = match s.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (s, None),
        };
        let need_path = |p: Option<&str>| match p {
            Some(p) if !p.is_empty() => Ok(PathBuf::from(p)),
            _ => Err(ConfigError::Resolver(format!("resolver {kind:?} needs a path, e.g. {kind}:PATH"))),
        };
        match kind {
            "live" if path.is_none() => Ok(ResolverMode::Live),
            "fixture" => need_path(path).map(ResolverMode::Fixture),
            "replay" => need_path(path).map(ResolverMode::Replay),
            "record" => need_path(path).map(ResolverMode::Record),
            _ => Err(ConfigError::Resolver(format!(
                "unknown resolver {s:?}; expected live, fixture:DIR, replay:FILE or record:FILE"
            ))),
        }
    }
}

impl fmt::Display for ResolverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolverMode::Live => f.write_str("live"),
            ResolverMode::Fixture(p) => write!(f, "fixture:{}", p.display()),
            ResolverMode::Replay(p) => write!(f, "replay:{}", p.display()),
            ResolverMode::Record(p) => write!(f, "record:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
    #[error("{0}")]
    Resolver(String),
}

/// Limits and resolver selection for dereferencing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchConfig {
    pub lookup_timeout: Duration,
    pub query_deadline: Duration,
    pub redirect_limit: u32,
    pub max_lookups: u32,
    pub max_parallel: u32,
    /// Minimum gap between requests to one host. Only network resolvers
    /// honor it.
    pub politeness: Duration,
    pub resolver: ResolverMode,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            lookup_timeout: Duration::from_secs(10),
            query_deadline: Duration::from_secs(600),
            redirect_limit: 5,
            max_lookups: 2000,
            max_parallel: 8,
            politeness: Duration::from_millis(500),
            resolver: ResolverMode::Live,
        }
    }
}

impl FetchConfig {
    pub fn with_resolver(resolver: ResolverMode) -> Self {
        FetchConfig {
            resolver,
            ..FetchConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = [
            (self.lookup_timeout.is_zero(), "lookup timeout"),
            (self.query_deadline.is_zero(), "query deadline"),
            (self.redirect_limit == 0, "redirect limit"),
            (self.max_lookups == 0, "max lookups"),
            (self.max_parallel == 0, "max parallel lookups"),
            (self.politeness.is_zero(), "politeness delay"),
        ];
        match checks.into_iter().find(|(bad, _)| *bad) {
            Some((_, name)) => Err(ConfigError::NonPositive(name)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_resolver_modes() {
        assert_eq!("live".parse::<ResolverMode>().unwrap(), ResolverMode::Live);
        assert_eq!("fixture:/tmp/w".parse::<ResolverMode>().unwrap(), ResolverMode::Fixture("/tmp/w".into()));
        assert_eq!("replay:a.bin".parse::<ResolverMode>().unwrap(), ResolverMode::Replay("a.bin".into()));
        assert!("replay".parse::<ResolverMode>().is_err());
        assert!("ftp:x".parse::<ResolverMode>().is_err());
        let mode = ResolverMode::Record("x/y.bin".into());
        assert_eq!(mode.to_string().parse::<ResolverMode>().unwrap(), mode);
    }

    #[test]
    fn defaults_are_valid_and_zero_limits_rejected() {
        let cfg = FetchConfig::default();
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.redirect_limit, 5);
        assert_eq!(cfg.max_lookups, 2000);
        let bad = FetchConfig {
            max_parallel: 0,
            ..cfg
        };
        assert_eq!(bad.validate(), Err(ConfigError::NonPositive("max parallel lookups")));
    }
}

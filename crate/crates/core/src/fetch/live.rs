use std::time::Duration;

use log::debug;
use ureq::Agent;

use super::transport::{Hop, Transport};

pub const ACCEPT: &str = "application/n-triples, text/plain;q=0.9, text/turtle;q=0.5, */*;q=0.1";

/// HTTP(S) lookups. Redirects are reported, not followed, so the fetch
/// manager can count every hop.
#[derive(Debug)]
pub struct LiveTransport {
    agent: Agent,
}

impl LiveTransport {
    pub fn new() -> Self {
        let config = Agent::config_builder()
            .max_redirects(0)
            .max_redirects_will_error(false)
            .http_status_as_error(false)
            .user_agent(concat!("ltqp/", env!("CARGO_PKG_VERSION")))
            .build();
        LiveTransport {
            agent: Agent::new_with_config(config),
        }
    }
}

impl Default for LiveTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for LiveTransport {
    fn lookup(&self, iri: &str, timeout: Duration) -> Hop {
        let response = self
            .agent
            .get(iri)
            .header("Accept", ACCEPT)
            .config()
            .timeout_global(Some(timeout))
            .build()
            .call();
        let mut response = match response {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Hop::Timeout,
            Err(err) => {
                debug!("{iri}: transport error: {err}");
                return Hop::Status(502);
            }
        };
        let status = response.status().as_u16();
        if response.status().is_redirection() {
            let location = response.headers().get("location").and_then(|v| v.to_str().ok());
            return match location {
                Some(loc) => Hop::Redirect(status, loc.to_owned()),
                None => Hop::Status(status),
            };
        }
        if !response.status().is_success() {
            return Hop::Status(status);
        }
        match response.body_mut().read_to_vec() {
            Ok(body) => Hop::Body(body),
            Err(ureq::Error::Timeout(_)) => Hop::Timeout,
            Err(err) => {
                debug!("{iri}: body read failed: {err}");
                Hop::Status(502)
            }
        }
    }

    fn is_network(&self) -> bool {
        true
    }
}

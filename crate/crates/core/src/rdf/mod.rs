//! RDF data model, N-Triples I/O and an indexed in-memory graph.

mod graph;
mod ntriples;
mod term;

use std::time::SystemTime;

pub use graph::Graph;
pub use ntriples::{parse_ntriples, scope_blank_nodes, serialize_ntriples, ParseError, ParseOutcome};
pub(crate) use ntriples::TermReader;
pub use term::{BlankNode, Iri, Literal, LiteralKind, Term, TermError, Triple};

/// One retrieved RDF document.
#[derive(Debug, Clone)]
pub struct Document {
    pub source: Iri,
    pub triples: Vec<Triple>,
    pub byte_size: usize,
    pub retrieved_at: SystemTime,
}

impl Document {
    /// Parses `body` with blank nodes scoped to `source`.
    pub fn parse(source: Iri, body: &[u8]) -> (Document, Vec<ParseError>) {
        let ParseOutcome { triples, errors } = parse_ntriples(body, source.as_str());
        let doc = Document {
            source,
            triples,
            byte_size: body.len(),
            retrieved_at: SystemTime::now(),
        };
        (doc, errors)
    }
}

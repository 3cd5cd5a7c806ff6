//! Link-traversal execution of basic graph pattern queries over a web of
//! RDF documents, with optional `owl:sameAs` canonicalization and ρDF
//! inference, plus the benchmark harness that compares the six setups.

pub mod bench;
pub mod engine;
pub mod fetch;
pub mod fixturegen;
pub mod query;
pub mod rdf;
pub mod reasoner;
pub mod vocab;

//! Basic graph pattern queries: model, a small SELECT parser, and the
//! structural classifier used to group benchmark queries.

mod classify;
mod model;
mod parser;

pub use classify::{classify, QueryClass};
pub use model::{BgpQuery, PatternTerm, Seeds, TriplePattern, Variable};
pub use parser::{parse_query, QueryError};

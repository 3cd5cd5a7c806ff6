use std::collections::BTreeSet;

use thiserror::Error;

use super::model::{BgpQuery, PatternTerm, TriplePattern, Variable};
use crate::rdf::{Term, TermReader};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at byte {position}: {reason}")]
    Syntax { position: usize, reason: String },
    #[error("query has no constant IRI to start traversal from")]
    Unseedable,
    #[error("query patterns do not form a connected join graph")]
    Disconnected,
    #[error("projected variable {0} does not occur in any pattern")]
    UnboundProjection(String),
}

/// Parses `SELECT ?a ?b WHERE { ... }` (or `SELECT *`), with terms written as
/// in N-Triples and patterns separated by `.`.
pub fn parse_query(text: &str, id: &str) -> Result<BgpQuery, QueryError> {
    let mut p = Parser {
        r: TermReader::new(text, None),
    };
    let (projection, patterns) = p.query()?;
    let mut query = BgpQuery {
        id: id.to_owned(),
        projection: Vec::new(),
        patterns,
    };
    let vars = query.variables();
    let projection = match projection {
        Some(list) => {
            if let Some(missing) = list.iter().find(|v| !vars.contains(v)) {
                return Err(QueryError::UnboundProjection(missing.to_string()));
            }
            list
        }
        None => {
            // SELECT * uses first-occurrence order
            let mut seen = BTreeSet::new();
            query
                .patterns
                .iter()
                .flat_map(TriplePattern::variables)
                .filter(|v| seen.insert((*v).clone()))
                .cloned()
                .collect()
        }
    };
    query.projection = projection;
    let seedable = query.constants().iter().any(|t| t.is_iri());
    if !seedable {
        return Err(QueryError::Unseedable);
    }
    if !query.is_connected() {
        return Err(QueryError::Disconnected);
    }
    Ok(query)
}

struct Parser<'a> {
    r: TermReader<'a>,
}

impl Parser<'_> {
    fn err<T>(&self, reason: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError::Syntax {
            position: self.r.position(),
            reason: reason.into(),
        })
    }

    fn keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        self.r.skip_ws();
        let rest = self.r.rest();
        let matches = rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && !rest[kw.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_');
        if matches {
            self.r.set_position(self.r.position() + kw.len());
            Ok(())
        } else {
            self.err(format!("expected {kw}"))
        }
    }

    fn query(&mut self) -> Result<(Option<Vec<Variable>>, Vec<TriplePattern>), QueryError> {
        self.keyword("SELECT")?;
        let _ = self.keyword("DISTINCT");
        self.r.skip_ws();
        let projection = if self.r.eat('*') {
            None
        } else {
            let mut vars = Vec::new();
            loop {
                self.r.skip_ws();
                match self.r.peek() {
                    Some('?' | '$') => {
                        let v = self.variable()?;
                        if !vars.contains(&v) {
                            vars.push(v);
                        }
                    }
                    _ => break,
                }
            }
            if vars.is_empty() {
                return self.err("expected projected variables or '*'");
            }
            Some(vars)
        };
        self.keyword("WHERE")?;
        self.r.skip_ws();
        if !self.r.eat('{') {
            return self.err("expected '{'");
        }
        let mut patterns = Vec::new();
        loop {
            self.r.skip_ws();
            if self.r.eat('}') {
                break;
            }
            patterns.push(self.pattern()?);
            self.r.skip_ws();
            if !self.r.eat('.') && self.r.peek() != Some('}') {
                return self.err("expected '.' or '}' after triple pattern");
            }
        }
        self.r.skip_ws();
        if self.r.peek().is_some() {
            return self.err("unexpected content after '}'");
        }
        if patterns.is_empty() {
            return self.err("query has no triple patterns");
        }
        Ok((projection, patterns))
    }

    fn variable(&mut self) -> Result<Variable, QueryError> {
        self.r.bump();
        let start = self.r.position();
        while matches!(self.r.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.r.bump();
        }
        let name = self.r.slice_from(start);
        if name.is_empty() {
            return self.err("empty variable name");
        }
        Ok(Variable::new(name))
    }

    fn term(&mut self, position: &'static str) -> Result<PatternTerm, QueryError> {
        self.r.skip_ws();
        let result = match self.r.peek() {
            Some('?' | '$') => return self.variable().map(PatternTerm::Var),
            Some('<') => self.r.iri().map(|iri| PatternTerm::Const(Term::Iri(iri))),
            Some('"') if position == "object" => self.r.literal().map(|l| PatternTerm::Const(Term::Literal(l))),
            Some('_') => Err("blank nodes are not supported in queries".to_owned()),
            Some(c) => Err(format!("unexpected {c:?} in {position} position")),
            None => Err("unexpected end of query".to_owned()),
        };
        result.or_else(|reason| self.err(reason))
    }

    fn pattern(&mut self) -> Result<TriplePattern, QueryError> {
        let subject = self.term("subject")?;
        let predicate = self.term("predicate")?;
        let object = self.term("object")?;
        Ok(TriplePattern {
            subject,
            predicate,
            object,
        })
    }
}

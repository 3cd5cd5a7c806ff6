use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("IRI is not absolute: {0:?}")]
    RelativeIri(String),
    #[error("IRI contains a forbidden character {1:?}: {0:?}")]
    ForbiddenChar(String, char),
    #[error("blank node label is empty")]
    EmptyLabel,
    #[error("literal language tag is malformed: {0:?}")]
    BadLanguage(String),
    #[error("a literal cannot appear in {0} position")]
    LiteralPosition(&'static str),
    #[error("predicate must be an IRI")]
    NonIriPredicate,
}

/// An absolute IRI.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        if let Some(c) = value
            .chars()
            .find(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
        {
            return Err(TermError::ForbiddenChar(value.to_owned(), c));
        }
        if !has_scheme(value) {
            return Err(TermError::RelativeIri(value.to_owned()));
        }
        Ok(Iri(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The IRI with any `#fragment` removed; the document a hash IRI lives in.
    pub fn without_fragment(&self) -> Iri {
        match self.0.find('#') {
            Some(idx) => Iri(Arc::from(&self.0[..idx])),
            None => self.clone(),
        }
    }

    /// Scheme-relative host component, if the IRI has an authority.
    pub fn host(&self) -> Option<&str> {
        let rest = self.0.split_once("://")?.1;
        let end = rest.find(['/', '?', '#']).unwrap_or(rest.len());
        let authority = &rest[..end];
        let authority = authority.rsplit_once('@').map_or(authority, |(_, h)| h);
        Some(authority)
    }
}

fn has_scheme(value: &str) -> bool {
    let Some((scheme, _)) = value.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for c in self.0.chars() {
            // non-printing characters are the only ones Iri::new lets through
            // that N-Triples forbids inside <...>
            if (c as u32) < 0x20 {
                write!(f, "\\u{:04X}", c as u32)?;
            } else {
                write!(f, "{c}")?;
            }
        }
        f.write_str(">")
    }
}

/// A blank node. The scope identifies the document it was read from, so
/// equal labels from different documents denote different nodes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BlankNode {
    label: Arc<str>,
    scope: Arc<str>,
}

impl BlankNode {
    pub fn new(label: impl AsRef<str>, scope: impl AsRef<str>) -> Result<Self, TermError> {
        let label = label.as_ref();
        if label.is_empty() {
            return Err(TermError::EmptyLabel);
        }
        Ok(BlankNode {
            label: Arc::from(label),
            scope: Arc::from(scope.as_ref()),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scope(&self) -> &str {
        &self.scope
    }

    pub fn with_scope(&self, scope: &Arc<str>) -> BlankNode {
        BlankNode {
            label: self.label.clone(),
            scope: scope.clone(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum LiteralKind {
    Simple,
    Typed(Iri),
    Lang(Arc<str>),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    lexical: Arc<str>,
    kind: LiteralKind,
}

impl Literal {
    pub fn simple(lexical: impl AsRef<str>) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            kind: LiteralKind::Simple,
        }
    }

    pub fn typed(lexical: impl AsRef<str>, datatype: Iri) -> Self {
        Literal {
            lexical: Arc::from(lexical.as_ref()),
            kind: LiteralKind::Typed(datatype),
        }
    }

    pub fn lang(lexical: impl AsRef<str>, tag: impl AsRef<str>) -> Result<Self, TermError> {
        let tag = tag.as_ref();
        let valid = !tag.is_empty()
            && tag.split('-').all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric()))
            && tag.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        if !valid {
            return Err(TermError::BadLanguage(tag.to_owned()));
        }
        Ok(Literal {
            lexical: Arc::from(lexical.as_ref()),
            kind: LiteralKind::Lang(Arc::from(tag)),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match &self.kind {
            LiteralKind::Typed(dt) => Some(dt),
            _ => None,
        }
    }

    pub fn language(&self) -> Option<&str> {
        match &self.kind {
            LiteralKind::Lang(tag) => Some(tag),
            _ => None,
        }
    }

    pub fn kind(&self) -> &LiteralKind {
        &self.kind
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        for c in self.lexical.chars() {
            match c {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                '\r' => f.write_str("\\r")?,
                c if (c as u32) < 0x20 || c == '\u{7f}' => write!(f, "\\u{:04X}", c as u32)?,
                c => write!(f, "{c}")?,
            }
        }
        f.write_str("\"")?;
        match &self.kind {
            LiteralKind::Simple => Ok(()),
            LiteralKind::Typed(dt) => write!(f, "^^{dt}"),
            LiteralKind::Lang(tag) => write!(f, "@{tag}"),
        }
    }
}

/// An RDF term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn iri(value: impl AsRef<str>) -> Result<Self, TermError> {
        Iri::new(value).map(Term::Iri)
    }

    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<BlankNode> for Term {
    fn from(node: BlankNode) -> Self {
        Term::Blank(node)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Blank(node) => write!(f, "_:{}", node.label),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

/// An RDF triple. Subjects are never literals and predicates are always IRIs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Term>, predicate: impl Into<Term>, object: impl Into<Term>) -> Result<Self, TermError> {
        let (subject, predicate, object) = (subject.into(), predicate.into(), object.into());
        if subject.is_literal() {
            return Err(TermError::LiteralPosition("subject"));
        }
        if !predicate.is_iri() {
            return Err(TermError::NonIriPredicate);
        }
        Ok(Triple { subject, predicate, object })
    }

    /// Builds a triple from terms the caller has already checked.
    pub(crate) fn from_parts(subject: Term, predicate: Term, object: Term) -> Self {
        debug_assert!(!subject.is_literal() && predicate.is_iri());
        Triple { subject, predicate, object }
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    /// Applies `f` to every term. `f` must map IRIs to IRIs and leave other
    /// kinds alone, which keeps the triple invariants intact.
    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Triple {
        Triple::from_parts(f(&self.subject), f(&self.predicate), f(&self.object))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_must_be_absolute() {
        assert!(Iri::new("http://a.org/x").is_ok());
        assert!(Iri::new("urn:isbn:123").is_ok());
        assert_eq!(Iri::new("a.org/x"), Err(TermError::RelativeIri("a.org/x".into())));
        assert!(Iri::new("1http://x").is_err());
        assert!(matches!(Iri::new("http://a.org/x y"), Err(TermError::ForbiddenChar(_, ' '))));
    }

    #[test]
    fn fragment_and_host() {
        let iri = Iri::new("http://user@a.org:8080/x/y#frag").unwrap();
        assert_eq!(iri.without_fragment().as_str(), "http://user@a.org:8080/x/y");
        assert_eq!(iri.host(), Some("a.org:8080"));
        assert_eq!(Iri::new("urn:x").unwrap().host(), None);
    }

    #[test]
    fn blank_nodes_differ_by_scope() {
        let a = BlankNode::new("b", "http://d1/").unwrap();
        let b = BlankNode::new("b", "http://d2/").unwrap();
        assert_ne!(a, b);
        assert_eq!(a, BlankNode::new("b", "http://d1/").unwrap());
    }

    #[test]
    fn literal_display_escapes() {
        let lit = Literal::simple("say \"hi\"\n");
        assert_eq!(lit.to_string(), r#""say \"hi\"\n""#);
        let lang = Literal::lang("chat", "fr-BE").unwrap();
        assert_eq!(lang.to_string(), "\"chat\"@fr-BE");
        assert!(Literal::lang("x", "-en").is_err());
    }

    #[test]
    fn triple_invariants() {
        let p = Term::iri("http://a.org/p").unwrap();
        let lit = Term::Literal(Literal::simple("v"));
        assert_eq!(Triple::new(lit.clone(), p.clone(), lit.clone()), Err(TermError::LiteralPosition("subject")));
        assert_eq!(Triple::new(p.clone(), lit.clone(), p.clone()), Err(TermError::NonIriPredicate));
        let t = Triple::new(p.clone(), p.clone(), lit).unwrap();
        assert_eq!(t.to_string(), "<http://a.org/p> <http://a.org/p> \"v\" .");
    }
}

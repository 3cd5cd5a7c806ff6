//! Lenient line-oriented N-Triples reader and writer.
//!
//! Every line is parsed on its own. A malformed line produces a
//! [`ParseError`] and is skipped; the rest of the document is still read.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::term::{BlankNode, Iri, Literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    pub reason: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Default, Clone)]
pub struct ParseOutcome {
    pub triples: Vec<Triple>,
    pub errors: Vec<ParseError>,
}

/// Parses N-Triples text. Blank nodes are scoped to `doc_scope`.
pub fn parse_ntriples(input: &[u8], doc_scope: &str) -> ParseOutcome {
    let scope: Arc<str> = Arc::from(doc_scope);
    let mut outcome = ParseOutcome::default();
    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        let line = match std::str::from_utf8(raw) {
            Ok(line) => line,
            Err(err) => {
                outcome.errors.push(ParseError {
                    line: idx + 1,
                    reason: format!("invalid UTF-8 at byte {}", err.valid_up_to()),
                });
                continue;
            }
        };
        match LineParser::new(line, &scope).parse() {
            Ok(Some(triple)) => outcome.triples.push(triple),
            Ok(None) => {}
            Err(reason) => outcome.errors.push(ParseError { line: idx + 1, reason }),
        }
    }
    outcome
}

/// Writes one line per triple. Blank nodes from different scopes that share a
/// label are given distinct labels so they stay distinct when read back.
pub fn serialize_ntriples(triples: &[Triple]) -> Vec<u8> {
    let mut labels: HashMap<(&str, &str), String> = HashMap::new();
    let mut used: HashSet<String> = HashSet::new();
    let mut out = String::new();
    for triple in triples {
        for (pos, term) in triple.terms().into_iter().enumerate() {
            if pos > 0 {
                out.push(' ');
            }
            match term {
                Term::Blank(node) => {
                    let label = labels.entry((node.label(), node.scope())).or_insert_with(|| {
                        let mut candidate = node.label().to_owned();
                        let mut n = 1;
                        while used.contains(&candidate) {
                            candidate = format!("{}_{n}", node.label());
                            n += 1;
                        }
                        used.insert(candidate.clone());
                        candidate
                    });
                    out.push_str("_:");
                    out.push_str(label);
                }
                other => out.push_str(&other.to_string()),
            }
        }
        out.push_str(" .\n");
    }
    out.into_bytes()
}

/// Re-scopes every blank node to `doc_scope`.
pub fn scope_blank_nodes(triples: &[Triple], doc_scope: &str) -> Vec<Triple> {
    let scope: Arc<str> = Arc::from(doc_scope);
    triples
        .iter()
        .map(|t| {
            t.map_terms(|term| match term {
                Term::Blank(node) => Term::Blank(node.with_scope(&scope)),
                other => other.clone(),
            })
        })
        .collect()
}

/// Reads single terms written in N-Triples syntax. Shared by the query parser.
pub(crate) struct TermReader<'a> {
    src: &'a str,
    pos: usize,
    scope: Option<&'a Arc<str>>,
}

impl<'a> TermReader<'a> {
    pub(crate) fn new(src: &'a str, scope: Option<&'a Arc<str>>) -> Self {
        TermReader { src, pos: 0, scope }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn set_position(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn slice_from(&self, start: usize) -> &'a str {
        &self.src[start..self.pos]
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Skips spaces and tabs; returns whether anything was skipped.
    pub(crate) fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
        self.pos > start
    }

    pub(crate) fn iri(&mut self) -> Result<Iri, String> {
        if !self.eat('<') {
            return Err(format!("expected '<' at column {}", self.pos + 1));
        }
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => value.push(self.unicode_escape()?),
                Some(c) => value.push(c),
            }
        }
        Iri::new(&value).map_err(|e| e.to_string())
    }

    pub(crate) fn blank(&mut self) -> Result<BlankNode, String> {
        if !self.rest().starts_with("_:") {
            return Err(format!("expected '_:' at column {}", self.pos + 1));
        }
        self.pos += 2;
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || matches!(c, '_' | '-' | '.')) {
            self.bump();
        }
        // a label may not end with '.', which is the statement terminator
        while self.pos > start && self.src[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        let label = &self.src[start..self.pos];
        if label.is_empty() {
            return Err("empty blank node label".into());
        }
        let scope = self.scope.ok_or("blank nodes are not allowed here")?;
        BlankNode::new(label, &**scope).map_err(|e| e.to_string())
    }

    pub(crate) fn literal(&mut self) -> Result<Literal, String> {
        if !self.eat('"') {
            return Err(format!("expected '\"' at column {}", self.pos + 1));
        }
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated string literal".into()),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            lexical.push(self.unicode_escape()?);
                            continue;
                        }
                        other => return Err(format!("invalid escape {other:?} in literal")),
                    };
                    self.bump();
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        if self.eat('@') {
            let start = self.pos;
            while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                self.bump();
            }
            Literal::lang(lexical, &self.src[start..self.pos]).map_err(|e| e.to_string())
        } else if self.rest().starts_with("^^") {
            self.pos += 2;
            Ok(Literal::typed(lexical, self.iri()?))
        } else {
            Ok(Literal::simple(lexical))
        }
    }

    /// Reads the part of `\uXXXX` / `\UXXXXXXXX` after the backslash.
    fn unicode_escape(&mut self) -> Result<char, String> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            other => return Err(format!("invalid escape {other:?}")),
        };
        let digits = self.rest().get(..len).ok_or("truncated unicode escape")?;
        let code = u32::from_str_radix(digits, 16).map_err(|_| format!("invalid unicode escape {digits:?}"))?;
        self.pos += len;
        char::from_u32(code).ok_or_else(|| format!("escape {digits:?} is not a scalar value"))
    }

    pub(crate) fn subject(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank().map(Term::Blank),
            _ => Err(format!("expected IRI or blank node at column {}", self.pos + 1)),
        }
    }

    pub(crate) fn object(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.blank().map(Term::Blank),
            Some('"') => self.literal().map(Term::Literal),
            _ => Err(format!("expected IRI, blank node or literal at column {}", self.pos + 1)),
        }
    }
}

struct LineParser<'a> {
    reader: TermReader<'a>,
}

impl<'a> LineParser<'a> {
    fn new(line: &'a str, scope: &'a Arc<str>) -> Self {
        LineParser {
            reader: TermReader::new(line, Some(scope)),
        }
    }

    fn parse(mut self) -> Result<Option<Triple>, String> {
        let r = &mut self.reader;
        r.skip_ws();
        if r.peek().is_none() || r.peek() == Some('#') {
            return Ok(None);
        }
        let subject = r.subject()?;
        r.skip_ws();
        let predicate = r.iri()?;
        r.skip_ws();
        let object = r.object()?;
        r.skip_ws();
        if !r.eat('.') {
            return Err("missing terminating '.'".into());
        }
        r.skip_ws();
        if !(r.peek().is_none() || r.peek() == Some('#')) {
            return Err(format!("unexpected trailing content {:?}", r.rest()));
        }
        Ok(Some(Triple::from_parts(subject, Term::Iri(predicate), object)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Term {
        Term::iri(s).unwrap()
    }

    #[test]
    fn single_line() {
        let out = parse_ntriples(b"<http://a.org/x> <http://a.org/p> \"v\" .", "d");
        assert_eq!(out.triples.len(), 1);
        assert!(out.errors.is_empty());
        assert_eq!(out.triples[0].object(), &Term::Literal(Literal::simple("v")));
    }

    #[test]
    fn empty_input() {
        let out = parse_ntriples(b"", "d");
        assert!(out.triples.is_empty() && out.errors.is_empty());
    }

    /// Independent check of which lines are well formed: a line counts when
    /// it has the three-term shape and ends with " ." after trimming.
    fn naive_line_check(text: &str) -> Vec<bool> {
        text.lines()
            .map(|l| {
                let l = l.trim();
                l.starts_with('<') && l.ends_with(" .") && l.matches('<').count() >= 2
            })
            .collect()
    }

    #[test]
    fn missing_dot_is_reported_and_skipped() {
        let text = "<http://a.org/s> <http://a.org/p> <http://a.org/o1> .\n\
                    <http://a.org/s> <http://a.org/p> <http://a.org/o2> .\n\
                    <http://a.org/s> <http://a.org/p> <http://a.org/o3>\n\
                    <http://a.org/s> <http://a.org/p> \"x\"@en .\n";
        let oracle = naive_line_check(text);
        assert_eq!(oracle, vec![true, true, false, true]);
        let out = parse_ntriples(text.as_bytes(), "d");
        assert_eq!(out.triples.len(), oracle.iter().filter(|ok| **ok).count());
        assert_eq!(out.errors.len(), 1);
        assert_eq!(out.errors[0].line, 3);
    }

    #[test]
    fn comments_blank_lines_and_crlf() {
        let text = "# header\r\n\r\n<http://a.org/s> <http://a.org/p> _:b1 . # trailing\r\n";
        let out = parse_ntriples(text.as_bytes(), "d");
        assert_eq!(out.triples.len(), 1);
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        assert_eq!(out.triples[0].object(), &Term::Blank(BlankNode::new("b1", "d").unwrap()));
    }

    #[test]
    fn escapes_and_datatypes() {
        let text = r#"<http://a.org/s> <http://a.org/p> "a\tbé\"c"^^<http://www.w3.org/2001/XMLSchema#string> ."#;
        let out = parse_ntriples(text.as_bytes(), "d");
        assert!(out.errors.is_empty(), "{:?}", out.errors);
        let Term::Literal(lit) = out.triples[0].object() else { panic!() };
        assert_eq!(lit.lexical(), "a\tbé\"c");
        assert_eq!(lit.datatype().unwrap().as_str(), crate::vocab::XSD_STRING);
    }

    #[test]
    fn rejects_bad_positions() {
        for bad in [
            "\"lit\" <http://a.org/p> <http://a.org/o> .",
            "<http://a.org/s> _:p <http://a.org/o> .",
            "<relative> <http://a.org/p> <http://a.org/o> .",
            "<http://a.org/s> <http://a.org/p> <http://a.org/o> . extra",
            "<http://a.org/s> <http://a.org/p> \"open .",
        ] {
            let out = parse_ntriples(bad.as_bytes(), "d");
            assert!(out.triples.is_empty(), "{bad}");
            assert_eq!(out.errors.len(), 1, "{bad}");
        }
    }

    #[test]
    fn invalid_utf8_line_is_isolated() {
        let mut bytes = b"<http://a.org/s> <http://a.org/p> <http://a.org/o> .\n".to_vec();
        bytes.extend_from_slice(&[0xff, 0xfe, b'\n']);
        let out = parse_ntriples(&bytes, "d");
        assert_eq!(out.triples.len(), 1);
        assert_eq!(out.errors[0].line, 2);
    }

    #[test]
    fn serialize_basics() {
        assert!(serialize_ntriples(&[]).is_empty());
        let t = Triple::new(iri("http://a.org/s"), iri("http://a.org/p"), iri("http://a.org/o")).unwrap();
        let text = String::from_utf8(serialize_ntriples(&[t])).unwrap();
        assert_eq!(text, "<http://a.org/s> <http://a.org/p> <http://a.org/o> .\n");
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn serialize_keeps_cross_scope_blanks_apart() {
        let p = iri("http://a.org/p");
        let b1 = Term::Blank(BlankNode::new("b", "d1").unwrap());
        let b2 = Term::Blank(BlankNode::new("b", "d2").unwrap());
        let triples = vec![
            Triple::new(b1.clone(), p.clone(), b1.clone()).unwrap(),
            Triple::new(b2.clone(), p.clone(), b1).unwrap(),
        ];
        let back = parse_ntriples(&serialize_ntriples(&triples), "x").triples;
        assert_eq!(back[0].subject(), back[0].object());
        assert_ne!(back[1].subject(), back[1].object());
        assert_eq!(back[1].object(), back[0].subject());
    }

    #[test]
    fn scoping_isolates_documents() {
        let p = iri("http://a.org/p");
        let t = Triple::new(Term::Blank(BlankNode::new("b", "tmp").unwrap()), p.clone(), iri("http://a.org/o")).unwrap();
        let d1 = scope_blank_nodes(std::slice::from_ref(&t), "D1");
        let d2 = scope_blank_nodes(std::slice::from_ref(&t), "D2");
        assert_ne!(d1[0].subject(), d2[0].subject());
        let plain = Triple::new(iri("http://a.org/s"), p, iri("http://a.org/o")).unwrap();
        assert_eq!(scope_blank_nodes(std::slice::from_ref(&plain), "D1"), vec![plain]);
    }
}

use std::collections::HashMap;
use std::ops::Range;

use super::term::{Term, Triple};

/// Append-only triple set with per-position indexes.
///
/// Triples keep their insertion position, so callers can ask for matches
/// inside a position range. The evaluator and the reasoner use this to
/// separate "old" triples from the latest delta.
#[derive(Debug, Default, Clone)]
pub struct Graph {
    triples: Vec<Triple>,
    positions: HashMap<Triple, u32>,
    by_subject: HashMap<Term, Vec<u32>>,
    by_predicate: HashMap<Term, Vec<u32>>,
    by_object: HashMap<Term, Vec<u32>>,
}

const EMPTY: &[u32] = &[];

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `triple`, returning false when it was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.positions.contains_key(&triple) {
            return false;
        }
        let pos = self.triples.len() as u32;
        self.by_subject.entry(triple.subject().clone()).or_default().push(pos);
        self.by_predicate.entry(triple.predicate().clone()).or_default().push(pos);
        self.by_object.entry(triple.object().clone()).or_default().push(pos);
        self.positions.insert(triple.clone(), pos);
        self.triples.push(triple);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.positions.contains_key(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    pub fn as_slice(&self) -> &[Triple] {
        &self.triples
    }

    /// Triples at positions in `range` matching the bound positions.
    pub fn matching<'a>(
        &'a self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
        range: Range<usize>,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        self.matching_indexed(subject, predicate, object, range).map(|(_, t)| t)
    }

    /// Like [`Graph::matching`], with each triple's position.
    pub fn matching_indexed<'a>(
        &'a self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
        range: Range<usize>,
    ) -> impl Iterator<Item = (usize, &'a Triple)> + 'a {
        let range = range.start..range.end.min(self.triples.len());
        let postings = [
            subject.map(|t| self.by_subject.get(t).map_or(EMPTY, Vec::as_slice)),
            predicate.map(|t| self.by_predicate.get(t).map_or(EMPTY, Vec::as_slice)),
            object.map(|t| self.by_object.get(t).map_or(EMPTY, Vec::as_slice)),
        ];
        let shortest = postings.into_iter().flatten().min_by_key(|p| p.len());
        let (subject, predicate, object) = (subject.cloned(), predicate.cloned(), object.cloned());
        let candidates: Box<dyn Iterator<Item = usize> + 'a> = match shortest {
            Some(list) => {
                // posting lists are sorted by position
                let lo = list.partition_point(|&p| (p as usize) < range.start);
                let hi = list.partition_point(|&p| (p as usize) < range.end);
                Box::new(list[lo..hi].iter().map(|&p| p as usize))
            }
            None => Box::new(range),
        };
        candidates.map(|p| (p, &self.triples[p])).filter(move |(_, t)| {
            subject.as_ref().is_none_or(|s| t.subject() == s)
                && predicate.as_ref().is_none_or(|p| t.predicate() == p)
                && object.as_ref().is_none_or(|o| t.object() == o)
        })
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut graph = Graph::new();
        for t in iter {
            graph.insert(t);
        }
        graph
    }
}

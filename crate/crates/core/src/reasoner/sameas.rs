use std::collections::HashMap;

use log::debug;

use crate::query::{PatternTerm, TriplePattern};
use crate::rdf::{Iri, Term, Triple};
use crate::vocab;

/// Union-find over IRIs linked by `owl:sameAs`.
///
/// The representative of a class is its lexicographically least IRI, so
/// the partition and its representatives do not depend on merge order.
#[derive(Debug, Clone, Default)]
pub struct EquivalenceClasses {
    ids: HashMap<Iri, usize>,
    iris: Vec<Iri>,
    parent: Vec<usize>,
    rank: Vec<u8>,
    /// Least member, valid at roots.
    least: Vec<usize>,
    /// Members, valid at roots.
    members: Vec<Vec<usize>>,
}

impl EquivalenceClasses {
    pub fn new() -> Self {
        Self::default()
    }

    fn id(&mut self, iri: &Iri) -> usize {
        if let Some(&id) = self.ids.get(iri) {
            return id;
        }
        let id = self.iris.len();
        self.ids.insert(iri.clone(), id);
        self.iris.push(iri.clone());
        self.parent.push(id);
        self.rank.push(0);
        self.least.push(id);
        self.members.push(vec![id]);
        id
    }

    fn root(&self, mut id: usize) -> usize {
        while self.parent[id] != id {
            id = self.parent[id];
        }
        id
    }

    fn compress(&mut self, mut id: usize, root: usize) {
        while self.parent[id] != root {
            let next = self.parent[id];
            self.parent[id] = root;
            id = next;
        }
    }

    /// Puts `a` and `b` in one class. Returns whether two classes were joined.
    pub fn merge(&mut self, a: &Iri, b: &Iri) -> bool {
        let (ia, ib) = (self.id(a), self.id(b));
        let (ra, rb) = (self.root(ia), self.root(ib));
        self.compress(ia, ra);
        self.compress(ib, rb);
        if ra == rb {
            return false;
        }
        let (big, small) = if self.rank[ra] >= self.rank[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big;
        if self.rank[big] == self.rank[small] {
            self.rank[big] += 1;
        }
        if self.iris[self.least[small]] < self.iris[self.least[big]] {
            self.least[big] = self.least[small];
        }
        let moved = std::mem::take(&mut self.members[small]);
        self.members[big].extend(moved);
        true
    }

    pub fn representative(&self, iri: &Iri) -> Iri {
        match self.ids.get(iri) {
            Some(&id) => self.iris[self.least[self.root(id)]].clone(),
            None => iri.clone(),
        }
    }

    pub fn same(&self, a: &Iri, b: &Iri) -> bool {
        a == b
            || matches!((self.ids.get(a), self.ids.get(b)), (Some(&x), Some(&y)) if self.root(x) == self.root(y))
    }

    /// All members of `iri`'s class, sorted; a singleton for unknown IRIs.
    pub fn members(&self, iri: &Iri) -> Vec<Iri> {
        match self.ids.get(iri) {
            Some(&id) => {
                let mut out: Vec<Iri> = self.members[self.root(id)].iter().map(|&m| self.iris[m].clone()).collect();
                out.sort();
                out
            }
            None => vec![iri.clone()],
        }
    }

    /// Classes with more than one member, each sorted, in sorted order.
    pub fn classes(&self) -> Vec<Vec<Iri>> {
        let mut out: Vec<Vec<Iri>> = (0..self.iris.len())
            .filter(|&i| self.parent[i] == i && self.members[i].len() > 1)
            .map(|root| {
                let mut c: Vec<Iri> = self.members[root].iter().map(|&m| self.iris[m].clone()).collect();
                c.sort();
                c
            })
            .collect();
        out.sort();
        out
    }

    pub fn is_trivial(&self) -> bool {
        self.members.iter().all(|m| m.len() <= 1)
    }

    /// Adds the `owl:sameAs` links among `triples`. Returns whether any two
    /// classes were joined.
    pub fn absorb<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) -> bool {
        let mut changed = false;
        for t in triples {
            if t.predicate().as_iri().map(Iri::as_str) != Some(vocab::OWL_SAMEAS) {
                continue;
            }
            match (t.subject(), t.object()) {
                (Term::Iri(a), Term::Iri(b)) => changed |= self.merge(a, b),
                _ => debug!("ignoring owl:sameAs between non-IRI terms: {t}"),
            }
        }
        changed
    }

    pub fn canonical_term(&self, term: &Term) -> Term {
        match term {
            Term::Iri(iri) => Term::Iri(self.representative(iri)),
            other => other.clone(),
        }
    }

    pub fn canonical_triple(&self, triple: &Triple) -> Triple {
        triple.map_terms(|t| self.canonical_term(t))
    }

    pub fn canonical_pattern(&self, pattern: &TriplePattern) -> TriplePattern {
        let map = |p: &PatternTerm| match p {
            PatternTerm::Const(t) => PatternTerm::Const(self.canonical_term(t)),
            var => var.clone(),
        };
        TriplePattern {
            subject: map(&pattern.subject),
            predicate: map(&pattern.predicate),
            object: map(&pattern.object),
        }
    }

    /// Canonicalizes the values of a solution row.
    pub fn canonical_row(&self, row: &[Term]) -> Vec<Term> {
        row.iter().map(|t| self.canonical_term(t)).collect()
    }
}

/// Builds equivalence classes from every `owl:sameAs` triple between IRIs.
pub fn merge_sameas<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> EquivalenceClasses {
    let mut eq = EquivalenceClasses::new();
    eq.absorb(triples);
    eq
}

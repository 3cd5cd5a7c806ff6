//! Brute-force answer sets: merge every document, optionally canonicalize
//! by sameAs components and close under the ρDF rules, then evaluate by
//! nested loops. Deliberately shares no code with the engine's evaluator
//! or the reasoner.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::path::Path;

use crate::engine::Setup;
use crate::fetch::{FixtureError, FixtureWeb, Resolution};
use crate::query::{BgpQuery, PatternTerm};
use crate::rdf::{parse_ntriples, Iri, Term, Triple};
use crate::vocab;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleFeatures {
    pub same_as: bool,
    pub rho_df: bool,
}

impl From<Setup> for OracleFeatures {
    fn from(setup: Setup) -> Self {
        let f = setup.features();
        OracleFeatures {
            same_as: f.same_as,
            rho_df: f.rho_df,
        }
    }
}

/// Every document of a fixture directory, keyed by the IRI that serves it.
pub fn load_fixture_documents(dir: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<Triple>>, FixtureError> {
    let web = FixtureWeb::load(dir)?;
    let mut docs = BTreeMap::new();
    for iri in web.iris() {
        let mut res = web.resolve(iri);
        while let Resolution::Delay(_, inner) = res {
            res = *inner;
        }
        if let Resolution::File(path) = res {
            let body = std::fs::read(&path).map_err(|source| FixtureError::Io { path, source })?;
            docs.insert(iri.to_owned(), parse_ntriples(&body, iri).triples);
        }
    }
    Ok(docs)
}

/// Answers of `query` over every document of the fixture in `dir`.
pub fn oracle_eval(dir: impl AsRef<Path>, query: &BgpQuery, features: OracleFeatures) -> Result<BTreeSet<Vec<Term>>, FixtureError> {
    let docs = load_fixture_documents(dir)?;
    Ok(oracle_eval_documents(docs.values().map(Vec::as_slice), query, features))
}

/// Answers of `query` over the union of `documents`.
pub fn oracle_eval_documents<'a>(
    documents: impl IntoIterator<Item = &'a [Triple]>,
    query: &BgpQuery,
    features: OracleFeatures,
) -> BTreeSet<Vec<Term>> {
    OracleStore::new(documents, features).eval(query)
}

/// The merged, canonicalized and closed store, reusable across queries.
pub struct OracleStore {
    triples: Vec<Triple>,
    reps: HashMap<Iri, Iri>,
}

impl OracleStore {
    pub fn new<'a>(documents: impl IntoIterator<Item = &'a [Triple]>, features: OracleFeatures) -> Self {
        let mut store: BTreeSet<Triple> = documents.into_iter().flatten().cloned().collect();
        let reps = if features.same_as { sameas_components(&store) } else { HashMap::new() };
        if features.same_as {
            store = store.iter().map(|t| t.map_terms(|x| canon(&reps, x))).collect();
        }
        if features.rho_df {
            naive_closure(&mut store);
        }
        OracleStore {
            triples: store.into_iter().collect(),
            reps,
        }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// `term` replaced by its sameAs representative, if it has one.
    pub fn canonical(&self, term: &Term) -> Term {
        canon(&self.reps, term)
    }

    pub fn eval(&self, query: &BgpQuery) -> BTreeSet<Vec<Term>> {
        let patterns: Vec<[PatternTerm; 3]> = query
            .patterns
            .iter()
            .map(|p| {
                p.positions().map(|pt| match pt {
                    PatternTerm::Const(c) => PatternTerm::Const(self.canonical(c)),
                    v => v.clone(),
                })
            })
            .collect();
        let mut rows: Vec<HashMap<&str, Term>> = vec![HashMap::new()];
        for pattern in &patterns {
            let mut next = Vec::new();
            for row in &rows {
                'triples: for t in &self.triples {
                    let mut extended = row.clone();
                    for (pt, term) in pattern.iter().zip(t.terms()) {
                        match pt {
                            PatternTerm::Const(c) if c != term => continue 'triples,
                            PatternTerm::Const(_) => {}
                            PatternTerm::Var(v) => match extended.get(v.name()) {
                                Some(bound) if bound != term => continue 'triples,
                                Some(_) => {}
                                None => {
                                    extended.insert(v.name(), term.clone());
                                }
                            },
                        }
                    }
                    next.push(extended);
                }
            }
            rows = next;
        }
        rows.into_iter()
            .map(|row| query.projection.iter().map(|v| row[v.name()].clone()).collect())
            .collect()
    }
}

fn canon(reps: &HashMap<Iri, Iri>, t: &Term) -> Term {
    match t {
        Term::Iri(i) => reps.get(i).map_or_else(|| t.clone(), |r| Term::Iri(r.clone())),
        other => other.clone(),
    }
}

/// Representative (least member) of each IRI in a nontrivial sameAs
/// component, found by breadth-first search.
fn sameas_components(store: &BTreeSet<Triple>) -> HashMap<Iri, Iri> {
    let mut adj: BTreeMap<Iri, Vec<Iri>> = BTreeMap::new();
    for t in store {
        if t.predicate().as_iri().map(Iri::as_str) != Some(vocab::OWL_SAMEAS) {
            continue;
        }
        if let (Term::Iri(a), Term::Iri(b)) = (t.subject(), t.object()) {
            adj.entry(a.clone()).or_default().push(b.clone());
            adj.entry(b.clone()).or_default().push(a.clone());
        }
    }
    let mut reps = HashMap::new();
    for start in adj.keys() {
        if reps.contains_key(start) {
            continue;
        }
        // keys are visited in sorted order, so `start` is the least member
        let mut queue = VecDeque::from([start.clone()]);
        reps.insert(start.clone(), start.clone());
        while let Some(n) = queue.pop_front() {
            for m in &adj[&n] {
                if !reps.contains_key(m) {
                    reps.insert(m.clone(), start.clone());
                    queue.push_back(m.clone());
                }
            }
        }
    }
    reps
}

/// Applies the six rules to the whole store until nothing changes.
fn naive_closure(store: &mut BTreeSet<Triple>) {
    let iri = |s: &str| Term::iri(s).expect("vocabulary IRIs are absolute");
    let (ty, sc, sp, dom, rng) = (
        iri(vocab::RDF_TYPE),
        iri(vocab::RDFS_SUBCLASSOF),
        iri(vocab::RDFS_SUBPROPERTYOF),
        iri(vocab::RDFS_DOMAIN),
        iri(vocab::RDFS_RANGE),
    );
    loop {
        let schema = |p: &Term| -> Vec<(Term, Term)> {
            store
                .iter()
                .filter(|t| t.predicate() == p && t.subject().is_iri() && t.object().is_iri())
                .map(|t| (t.subject().clone(), t.object().clone()))
                .collect()
        };
        let (scs, sps, doms, rngs) = (schema(&sc), schema(&sp), schema(&dom), schema(&rng));
        let mut new = Vec::new();
        let mut add = |s: &Term, p: &Term, o: &Term| new.push(Triple::new(s.clone(), p.clone(), o.clone()));
        for (a, b) in &scs {
            for (c, d) in &scs {
                if b == c {
                    add(a, &sc, d);
                }
            }
        }
        for (a, b) in &sps {
            for (c, d) in &sps {
                if b == c {
                    add(a, &sp, d);
                }
            }
        }
        for t in store.iter() {
            let (s, p, o) = (t.subject(), t.predicate(), t.object());
            if p == &ty {
                for (c, d) in &scs {
                    if c == o {
                        add(s, &ty, d);
                    }
                }
            }
            for (q, r) in &sps {
                if q == p {
                    add(s, r, o);
                }
            }
            for (q, c) in &doms {
                if q == p {
                    add(s, &ty, c);
                }
            }
            if !o.is_literal() {
                for (q, c) in &rngs {
                    if q == p {
                        add(o, &ty, c);
                    }
                }
            }
        }
        let before = store.len();
        // a literal or blank subject can only arise from rule 6 on a
        // literal, which is excluded above
        store.extend(new.into_iter().filter_map(Result::ok));
        if store.len() == before {
            break;
        }
    }
}

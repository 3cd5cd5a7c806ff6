//! Forward chaining for the ρDF fragment of RDFS.
//!
//! The rule set is fixed:
//!
//! 1. `a sc b, b sc c => a sc c`
//! 2. `p sp q, q sp r => p sp r`
//! 3. `x type C, C sc D => x type D`
//! 4. `x p y, p sp q => x q y`
//! 5. `x p y, p domain C => x type C`
//! 6. `x p y, p range C => y type C` when `y` is not a literal
//!
//! Schema premises (`sc`, `sp`, `domain`, `range`) only count when both
//! their subject and object are IRIs.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab;

struct Builtins {
    sub_class: Term,
    sub_prop: Term,
    domain: Term,
    range: Term,
    rdf_type: Term,
}

fn builtins() -> &'static Builtins {
    static B: OnceLock<Builtins> = OnceLock::new();
    B.get_or_init(|| {
        let iri = |s| Term::iri(s).expect("vocabulary IRIs are absolute");
        Builtins {
            sub_class: iri(vocab::RDFS_SUBCLASSOF),
            sub_prop: iri(vocab::RDFS_SUBPROPERTYOF),
            domain: iri(vocab::RDFS_DOMAIN),
            range: iri(vocab::RDFS_RANGE),
            rdf_type: iri(vocab::RDF_TYPE),
        }
    })
}

/// Schema axioms split by predicate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VocabStatements {
    pub sub_class_of: Vec<(Iri, Iri)>,
    pub sub_property_of: Vec<(Iri, Iri)>,
    pub domain: Vec<(Iri, Iri)>,
    pub range: Vec<(Iri, Iri)>,
}

impl VocabStatements {
    /// Collects the schema axioms among `triples`. Axioms with a blank or
    /// literal end are dropped.
    pub fn from_triples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Self {
        let b = builtins();
        let mut v = VocabStatements::default();
        for t in triples {
            let (Term::Iri(s), Term::Iri(o)) = (t.subject(), t.object()) else {
                continue;
            };
            let pair = (s.clone(), o.clone());
            let p = t.predicate();
            if p == &b.sub_class {
                v.sub_class_of.push(pair);
            } else if p == &b.sub_prop {
                v.sub_property_of.push(pair);
            } else if p == &b.domain {
                v.domain.push(pair);
            } else if p == &b.range {
                v.range.push(pair);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.sub_class_of.len() + self.sub_property_of.len() + self.domain.len() + self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_triples(&self) -> Vec<Triple> {
        let b = builtins();
        let groups = [
            (&b.sub_class, &self.sub_class_of),
            (&b.sub_prop, &self.sub_property_of),
            (&b.domain, &self.domain),
            (&b.range, &self.range),
        ];
        groups
            .into_iter()
            .flat_map(|(p, pairs)| {
                pairs
                    .iter()
                    .map(move |(s, o)| Triple::from_parts(Term::Iri(s.clone()), p.clone(), Term::Iri(o.clone())))
            })
            .collect()
    }
}

/// Novel triples produced per rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RuleCounts(pub [usize; 6]);

impl RuleCounts {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn add(&mut self, other: RuleCounts) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }
}

impl fmt::Display for RuleCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["sc-trans", "sp-trans", "type-sc", "sp-inherit", "domain", "range"];
        for (i, (name, n)) in names.iter().zip(self.0).enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}={n}")?;
        }
        Ok(())
    }
}

fn is_schema(t: &Triple) -> bool {
    t.subject().is_iri() && t.object().is_iri()
}

/// Saturates `graph` under the ρDF rules, treating triples at positions
/// `from..` as new. Everything before `from` must already be closed.
/// Returns per-rule counts of inserted triples.
pub fn saturate(graph: &mut Graph, from: usize) -> RuleCounts {
    let mut counts = RuleCounts::default();
    let mut delta_start = from;
    while delta_start < graph.len() {
        let delta_end = graph.len();
        let mut fresh: Vec<(usize, Triple)> = Vec::new();
        for pos in delta_start..delta_end {
            let d = graph.as_slice()[pos].clone();
            fire(graph, &d, delta_end, &mut fresh);
        }
        for (rule, t) in fresh {
            if graph.insert(t) {
                counts.0[rule] += 1;
            }
        }
        delta_start = delta_end;
    }
    counts
}

/// Joins `d` with every triple in `graph[..end]` under each rule.
fn fire(graph: &Graph, d: &Triple, end: usize, out: &mut Vec<(usize, Triple)>) {
    let b = builtins();
    let all = 0..end;
    let (s, p, o) = (d.subject(), d.predicate(), d.object());
    let schema = is_schema(d);
    let mut emit = |rule: usize, s: &Term, p: &Term, o: &Term| {
        let t = Triple::from_parts(s.clone(), p.clone(), o.clone());
        if !graph.contains(&t) {
            out.push((rule, t));
        }
    };

    // rules 1 and 2: transitivity, with d on either side
    for (rule, pred) in [(0, &b.sub_class), (1, &b.sub_prop)] {
        if p == pred && schema {
            for right in graph.matching(Some(o), Some(pred), None, all.clone()).filter(|t| is_schema(t)) {
                emit(rule, s, pred, right.object());
            }
            for left in graph.matching(None, Some(pred), Some(s), all.clone()).filter(|t| is_schema(t)) {
                emit(rule, left.subject(), pred, o);
            }
        }
    }

    // rule 3
    if p == &b.rdf_type && o.is_iri() {
        for axiom in graph.matching(Some(o), Some(&b.sub_class), None, all.clone()).filter(|t| is_schema(t)) {
            emit(2, s, &b.rdf_type, axiom.object());
        }
    }
    if p == &b.sub_class && schema {
        for inst in graph.matching(None, Some(&b.rdf_type), Some(s), all.clone()) {
            emit(2, inst.subject(), &b.rdf_type, o);
        }
    }

    // rules 4-6 with d as the data premise
    for axiom in graph.matching(Some(p), Some(&b.sub_prop), None, all.clone()).filter(|t| is_schema(t)) {
        emit(3, s, axiom.object(), o);
    }
    for axiom in graph.matching(Some(p), Some(&b.domain), None, all.clone()).filter(|t| is_schema(t)) {
        emit(4, s, &b.rdf_type, axiom.object());
    }
    if !o.is_literal() {
        for axiom in graph.matching(Some(p), Some(&b.range), None, all.clone()).filter(|t| is_schema(t)) {
            emit(5, o, &b.rdf_type, axiom.object());
        }
    }

    // rules 4-6 with d as the schema premise
    if schema {
        if p == &b.sub_prop {
            for data in graph.matching(None, Some(s), None, all.clone()) {
                emit(3, data.subject(), o, data.object());
            }
        } else if p == &b.domain {
            for data in graph.matching(None, Some(s), None, all.clone()) {
                emit(4, data.subject(), &b.rdf_type, o);
            }
        } else if p == &b.range {
            for data in graph.matching(None, Some(s), None, all.clone()).filter(|t| !t.object().is_literal()) {
                emit(5, data.object(), &b.rdf_type, o);
            }
        }
    }
}

/// The triples entailed by `data` and `vocab` under the ρDF rules that are
/// not already in either input.
pub fn rho_df_closure(data: &[Triple], vocab: &VocabStatements) -> BTreeSet<Triple> {
    let mut graph: Graph = data.iter().cloned().chain(vocab.to_triples()).collect();
    let base = graph.len();
    saturate(&mut graph, 0);
    graph.as_slice()[base..].iter().cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://a.org/{s}")).unwrap()
    }

    fn ty() -> Term {
        Term::iri(vocab::RDF_TYPE).unwrap()
    }

    fn sc(a: &str, b: &str) -> Triple {
        Triple::new(iri(a), Term::iri(vocab::RDFS_SUBCLASSOF).unwrap(), iri(b)).unwrap()
    }

    #[test]
    fn empty_vocab_infers_nothing() {
        let data = vec![Triple::new(iri("e"), iri("p"), iri("o")).unwrap()];
        assert!(rho_df_closure(&data, &VocabStatements::default()).is_empty());
    }

    #[test]
    fn subclass_chain() {
        let data = vec![Triple::new(iri("e"), ty(), iri("A")).unwrap()];
        let vocab = VocabStatements::from_triples(&[sc("A", "B"), sc("B", "C")]);
        let inferred = rho_df_closure(&data, &vocab);
        let types: Vec<_> = inferred.iter().filter(|t| t.predicate() == &ty()).collect();
        assert_eq!(types.len(), 2);
        assert!(inferred.contains(&Triple::new(iri("e"), ty(), iri("C")).unwrap()));
        // plus A sc C from transitivity
        assert_eq!(inferred.len(), 3);
    }

    #[test]
    fn range_skips_literals() {
        let range = Triple::new(iri("p"), Term::iri(vocab::RDFS_RANGE).unwrap(), iri("R")).unwrap();
        let data = vec![Triple::new(iri("x"), iri("p"), crate::rdf::Literal::simple("v")).unwrap()];
        assert!(rho_df_closure(&data, &VocabStatements::from_triples(&[range])).is_empty());
    }

    #[test]
    fn subproperty_then_domain() {
        let sp = Triple::new(iri("p2"), Term::iri(vocab::RDFS_SUBPROPERTYOF).unwrap(), iri("p")).unwrap();
        let dom = Triple::new(iri("p"), Term::iri(vocab::RDFS_DOMAIN).unwrap(), iri("D")).unwrap();
        let data = vec![Triple::new(iri("x"), iri("p2"), iri("y")).unwrap()];
        let inferred = rho_df_closure(&data, &VocabStatements::from_triples(&[sp, dom]));
        assert!(inferred.contains(&Triple::new(iri("x"), iri("p"), iri("y")).unwrap()));
        assert!(inferred.contains(&Triple::new(iri("x"), ty(), iri("D")).unwrap()));
        assert_eq!(inferred.len(), 2);
    }

    #[test]
    fn incremental_matches_batch() {
        let sp = Triple::new(iri("p2"), Term::iri(vocab::RDFS_SUBPROPERTYOF).unwrap(), iri("p")).unwrap();
        let data = Triple::new(iri("x"), iri("p2"), iri("y")).unwrap();
        // data first, schema arrives in a later delta
        let mut g = Graph::new();
        g.insert(data.clone());
        saturate(&mut g, 0);
        let before = g.len();
        g.insert(sp.clone());
        let counts = saturate(&mut g, before);
        assert_eq!(counts.0[3], 1);
        assert!(g.contains(&Triple::new(iri("x"), iri("p"), iri("y")).unwrap()));
    }
}

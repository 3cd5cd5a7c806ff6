use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::query::{BgpQuery, PatternTerm, Variable};
use crate::rdf::{Iri, Term, Triple};
use crate::vocab;

/// The six execution setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Setup {
    #[serde(rename = "base")]
    Base,
    #[serde(rename = "select")]
    Select,
    #[serde(rename = "seeAlso")]
    SeeAlso,
    #[serde(rename = "sameAs")]
    SameAs,
    #[serde(rename = "rhoDF")]
    RhoDf,
    #[serde(rename = "combined")]
    Combined,
}

impl Setup {
    pub const ALL: [Setup; 6] = [
        Setup::Base,
        Setup::Select,
        Setup::SeeAlso,
        Setup::SameAs,
        Setup::RhoDf,
        Setup::Combined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Setup::Base => "base",
            Setup::Select => "select",
            Setup::SeeAlso => "seeAlso",
            Setup::SameAs => "sameAs",
            Setup::RhoDf => "rhoDF",
            Setup::Combined => "combined",
        }
    }

    pub fn features(self) -> Features {
        let f = Features::default();
        match self {
            Setup::Base => f,
            Setup::Select => Features { select: true, ..f },
            Setup::SeeAlso => Features { see_also: true, ..f },
            Setup::SameAs => Features { same_as: true, ..f },
            Setup::RhoDf => Features {
                select: true,
                rho_df: true,
                ..f
            },
            Setup::Combined => Features {
                select: true,
                see_also: true,
                same_as: true,
                rho_df: true,
            },
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown setup {0:?}; expected one of base, select, seeAlso, sameAs, rhoDF, combined")]
pub struct UnknownSetup(pub String);

impl FromStr for Setup {
    type Err = UnknownSetup;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "base" => Ok(Setup::Base),
            "select" => Ok(Setup::Select),
            "seealso" => Ok(Setup::SeeAlso),
            "sameas" => Ok(Setup::SameAs),
            "rhodf" | "ρdf" => Ok(Setup::RhoDf),
            "combined" => Ok(Setup::Combined),
            _ => Err(UnknownSetup(s.to_owned())),
        }
    }
}

/// Parses a comma-separated setup list.
pub fn parse_setups(list: &str) -> Result<Vec<Setup>, UnknownSetup> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

/// What a setup switches on. `select` replaces the base link-following
/// rule with binding-driven lookups.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Features {
    pub select: bool,
    pub see_also: bool,
    pub same_as: bool,
    pub rho_df: bool,
}

/// Why an IRI was put on the frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Reason {
    Seed,
    BindingConstant,
    SeeAlsoLink,
    SameAsLink,
    Vocabulary,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::Seed => "seed",
            Reason::BindingConstant => "binding",
            Reason::SeeAlsoLink => "seeAlso",
            Reason::SameAsLink => "sameAs",
            Reason::Vocabulary => "vocabulary",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EngineOptions {
    /// Under the base rule, also dereference predicates of matching triples.
    pub deref_predicates: bool,
}

/// Something the traversal learned.
#[derive(Debug, Clone, Copy)]
pub enum PolicyEvent<'a> {
    /// A retrieved triple, as stated and after canonicalization.
    Triple { raw: &'a Triple, canonical: &'a Triple },
    /// A new (partial) binding.
    Binding(&'a [(Variable, Term)]),
}

/// Query-level facts the policies consult.
pub struct PolicyContext<'a> {
    /// The query, with constants canonicalized.
    pub query: &'a BgpQuery,
    pub relevant: &'a dyn Fn(&Iri) -> bool,
    pub options: EngineOptions,
}

/// Variables that only ever occur in predicate position.
pub fn predicate_only_variables(q: &BgpQuery) -> HashSet<Variable> {
    let mut pred = HashSet::new();
    let mut other = HashSet::new();
    for p in &q.patterns {
        pred.extend(p.predicate.as_var().cloned());
        other.extend([&p.subject, &p.object].into_iter().filter_map(PatternTerm::as_var).cloned());
    }
    pred.retain(|v| !other.contains(v));
    pred
}

fn is(term: &Term, iri: &str) -> bool {
    term.as_iri().is_some_and(|i| i.as_str() == iri)
}

fn vocab_target(term: &Term, out: &mut BTreeSet<(Iri, Reason)>) {
    if let Term::Iri(iri) = term {
        if !vocab::is_builtin(iri.as_str()) {
            out.insert((iri.clone(), Reason::Vocabulary));
        }
    }
}

/// Lookups `setup` derives from one event. Class-membership expansion
/// under sameAs is handled by the traversal, which knows the classes.
pub fn policy_targets(event: PolicyEvent<'_>, setup: Setup, ctx: &PolicyContext<'_>) -> BTreeSet<(Iri, Reason)> {
    let f = setup.features();
    let mut out = BTreeSet::new();
    match event {
        PolicyEvent::Binding(values) => {
            if f.select {
                let skip = predicate_only_variables(ctx.query);
                for (var, value) in values {
                    if let (false, Term::Iri(iri)) = (skip.contains(var), value) {
                        out.insert((iri.clone(), Reason::BindingConstant));
                    }
                }
            }
        }
        PolicyEvent::Triple { raw, canonical } => {
            let (s, p, o) = (raw.subject(), raw.predicate(), raw.object());
            if !f.select && ctx.query.patterns.iter().any(|pat| pat.matches(canonical)) {
                let mut ends = vec![s, o];
                if ctx.options.deref_predicates {
                    ends.push(p);
                }
                for iri in ends.into_iter().filter_map(Term::as_iri) {
                    out.insert((iri.clone(), Reason::BindingConstant));
                }
            }
            if f.see_also && is(p, vocab::RDFS_SEEALSO) {
                if let (Some(si), Term::Iri(target)) = (s.as_iri(), o) {
                    if (ctx.relevant)(si) {
                        out.insert((target.clone(), Reason::SeeAlsoLink));
                    }
                }
            }
            if f.same_as && is(p, vocab::OWL_SAMEAS) {
                if let (Term::Iri(a), Term::Iri(b)) = (s, o) {
                    if (ctx.relevant)(a) || (ctx.relevant)(b) {
                        out.insert((a.clone(), Reason::SameAsLink));
                        out.insert((b.clone(), Reason::SameAsLink));
                    }
                }
            }
            if f.rho_df {
                vocab_target(p, &mut out);
                if is(p, vocab::RDF_TYPE) {
                    vocab_target(o, &mut out);
                }
                let schema = [
                    vocab::RDFS_SUBCLASSOF,
                    vocab::RDFS_SUBPROPERTYOF,
                    vocab::RDFS_DOMAIN,
                    vocab::RDFS_RANGE,
                ];
                if schema.iter().any(|v| is(p, v)) {
                    vocab_target(s, &mut out);
                    vocab_target(o, &mut out);
                }
            }
        }
    }
    out
}

/// Lookups made before any data arrives.
pub fn initial_targets(q: &BgpQuery, setup: Setup) -> BTreeSet<(Iri, Reason)> {
    let seeds = q.seed_iris();
    let mut out: BTreeSet<(Iri, Reason)> = seeds.resources.iter().map(|i| (i.clone(), Reason::Seed)).collect();
    if seeds.resources.is_empty() {
        // predicate-only queries start from their predicates
        out.extend(seeds.predicates.iter().map(|i| (i.clone(), Reason::Seed)));
    }
    if setup.features().rho_df {
        for iri in &seeds.predicates {
            vocab_target(&Term::Iri(iri.clone()), &mut out);
        }
        for p in &q.patterns {
            if let (Some(pred), Some(class)) = (p.predicate.as_const(), p.object.as_const()) {
                if is(pred, vocab::RDF_TYPE) {
                    vocab_target(class, &mut out);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://a.org/{s}")).unwrap()
    }

    fn triple(s: &str, p: &str, o: &str) -> Triple {
        Triple::new(iri(s), iri(p), iri(o)).unwrap()
    }

    fn targets(setup: Setup, t: &Triple, relevant: &dyn Fn(&Iri) -> bool) -> BTreeSet<(Iri, Reason)> {
        let q = parse_query("SELECT ?o WHERE { <http://a.org/e> <http://a.org/p> ?o }", "q").unwrap();
        let ctx = PolicyContext {
            query: &q,
            relevant,
            options: EngineOptions::default(),
        };
        policy_targets(PolicyEvent::Triple { raw: t, canonical: t }, setup, &ctx)
    }

    #[test]
    fn setup_names_round_trip() {
        for s in Setup::ALL {
            assert_eq!(s.name().parse::<Setup>().unwrap(), s);
        }
        assert_eq!("ρDF".parse::<Setup>().unwrap(), Setup::RhoDf);
        let err = "fast".parse::<Setup>().unwrap_err().to_string();
        for s in Setup::ALL {
            assert!(err.contains(s.name()));
        }
    }

    #[test]
    fn combined_enables_everything() {
        let f = Setup::Combined.features();
        assert!(f.select && f.see_also && f.same_as && f.rho_df);
        assert_eq!(Setup::Base.features(), Features::default());
    }

    #[test]
    fn base_follows_matching_triples() {
        let t = triple("e", "p", "o");
        let got = targets(Setup::Base, &t, &|_| false);
        assert!(got.contains(&(iri("o"), Reason::BindingConstant)));
        assert!(!got.iter().any(|(i, _)| i == &iri("p")));
        assert!(targets(Setup::Base, &triple("e", "q", "o"), &|_| false).is_empty());
    }

    #[test]
    fn select_ignores_triples_and_follows_bindings() {
        assert!(targets(Setup::Select, &triple("e", "p", "o"), &|_| false).is_empty());
        let q = parse_query("SELECT ?o WHERE { <http://a.org/e> <http://a.org/p> ?o }", "q").unwrap();
        let ctx = PolicyContext {
            query: &q,
            relevant: &|_| false,
            options: EngineOptions::default(),
        };
        let binding = [(Variable::new("o"), Term::Iri(iri("o")))];
        let got = policy_targets(PolicyEvent::Binding(&binding), Setup::Select, &ctx);
        assert_eq!(got, BTreeSet::from([(iri("o"), Reason::BindingConstant)]));
        assert!(policy_targets(PolicyEvent::Binding(&binding), Setup::Base, &ctx).is_empty());
    }

    #[test]
    fn see_also_from_relevant_subject() {
        let t = Triple::new(iri("e"), Iri::new(vocab::RDFS_SEEALSO).unwrap(), iri("d")).unwrap();
        let e = iri("e");
        let got = targets(Setup::SeeAlso, &t, &|i| i == &e);
        assert!(got.contains(&(iri("d"), Reason::SeeAlsoLink)));
        assert!(targets(Setup::SeeAlso, &t, &|_| false).is_empty());
    }

    #[test]
    fn rho_df_looks_up_vocabulary() {
        let t = Triple::new(iri("x"), Iri::new(vocab::RDF_TYPE).unwrap(), iri("C")).unwrap();
        let got = targets(Setup::RhoDf, &t, &|_| false);
        assert_eq!(got, BTreeSet::from([(iri("C"), Reason::Vocabulary)]));
    }

    #[test]
    fn predicate_only_query_seeds_predicates() {
        let q = parse_query("SELECT ?s WHERE { ?s <http://a.org/p> ?o }", "q").unwrap();
        assert_eq!(initial_targets(&q, Setup::Base), BTreeSet::from([(iri("p"), Reason::Seed)]));
    }
}

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::rdf::{Iri, Term, Triple};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl AsRef<str>) -> Self {
        Variable(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PatternTerm {
    Const(Term),
    Var(Variable),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(Variable::new(name))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&Term> {
        match self {
            PatternTerm::Const(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, PatternTerm::Var(_))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, PatternTerm::Const(_))
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Const(t)
    }
}

impl From<Iri> for PatternTerm {
    fn from(iri: Iri) -> Self {
        PatternTerm::Const(Term::Iri(iri))
    }
}

impl From<Variable> for PatternTerm {
    fn from(v: Variable) -> Self {
        PatternTerm::Var(v)
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Const(t) => t.fmt(f),
            PatternTerm::Var(v) => v.fmt(f),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: impl Into<PatternTerm>, predicate: impl Into<PatternTerm>, object: impl Into<PatternTerm>) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(PatternTerm::as_var)
    }

    /// Whether `triple` matches this pattern on its own, with repeated
    /// variables required to take equal values.
    pub fn matches(&self, triple: &Triple) -> bool {
        let mut seen: [(Option<&Variable>, Option<&Term>); 3] = [(None, None); 3];
        for (i, (pat, term)) in self.positions().into_iter().zip(triple.terms()).enumerate() {
            match pat {
                PatternTerm::Const(c) if c != term => return false,
                PatternTerm::Const(_) => {}
                PatternTerm::Var(v) => {
                    if seen[..i].iter().any(|(sv, st)| *sv == Some(v) && *st != Some(term)) {
                        return false;
                    }
                    seen[i] = (Some(v), Some(term));
                }
            }
        }
        true
    }

    /// Number of constant subject/object positions.
    pub(crate) fn anchor_count(&self) -> usize {
        [&self.subject, &self.object].iter().filter(|p| p.is_const()).count()
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

/// IRIs a traversal starts from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Seeds {
    /// Constant IRIs in subject or object position.
    pub resources: BTreeSet<Iri>,
    /// Constant IRIs in predicate position; only fetched as vocabulary.
    pub predicates: BTreeSet<Iri>,
}

/// A SELECT query over a basic graph pattern.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BgpQuery {
    pub id: String,
    pub projection: Vec<Variable>,
    pub patterns: Vec<TriplePattern>,
}

impl BgpQuery {
    pub fn variables(&self) -> BTreeSet<&Variable> {
        self.patterns.iter().flat_map(TriplePattern::variables).collect()
    }

    pub fn constants(&self) -> BTreeSet<&Term> {
        self.patterns
            .iter()
            .flat_map(|p| p.positions())
            .filter_map(PatternTerm::as_const)
            .collect()
    }

    pub fn seed_iris(&self) -> Seeds {
        let mut seeds = Seeds::default();
        for pattern in &self.patterns {
            for pos in [&pattern.subject, &pattern.object] {
                if let Some(Term::Iri(iri)) = pos.as_const() {
                    seeds.resources.insert(iri.clone());
                }
            }
            if let Some(Term::Iri(iri)) = pattern.predicate.as_const() {
                seeds.predicates.insert(iri.clone());
            }
        }
        seeds
    }

    /// Whether the patterns form one connected join graph. Two patterns are
    /// adjacent when they share a variable, or a constant in subject/object
    /// position.
    pub fn is_connected(&self) -> bool {
        let n = self.patterns.len();
        if n <= 1 {
            return true;
        }
        let keys: Vec<Vec<PatternTerm>> = self
            .patterns
            .iter()
            .map(|p| {
                let mut keys: Vec<PatternTerm> = p.variables().cloned().map(PatternTerm::Var).collect();
                keys.extend([&p.subject, &p.object].into_iter().filter(|t| t.is_const()).cloned());
                keys
            })
            .collect();
        let mut by_key: HashMap<&PatternTerm, Vec<usize>> = HashMap::new();
        for (i, ks) in keys.iter().enumerate() {
            for k in ks {
                by_key.entry(k).or_default().push(i);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for k in &keys[i] {
                for &j in &by_key[k] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Pattern indices in evaluation order: start at the most anchored
    /// pattern, then keep preferring patterns joined to already-bound
    /// variables, anchored ones first.
    pub fn evaluation_order(&self) -> Vec<usize> {
        let n = self.patterns.len();
        let mut order = Vec::with_capacity(n);
        let mut used = vec![false; n];
        let mut bound: BTreeSet<&Variable> = BTreeSet::new();
        while order.len() < n {
            let next = (0..n)
                .filter(|&i| !used[i])
                .max_by_key(|&i| {
                    let p = &self.patterns[i];
                    let joined = p.variables().any(|v| bound.contains(v));
                    let consts = p.positions().iter().filter(|t| t.is_const()).count();
                    (joined, p.anchor_count() > 0, consts, std::cmp::Reverse(i))
                })
                .expect("unused pattern remains");
            used[next] = true;
            bound.extend(self.patterns[next].variables());
            order.push(next);
        }
        order
    }
}

impl fmt::Display for BgpQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT")?;
        for v in &self.projection {
            write!(f, " {v}")?;
        }
        f.write_str(" WHERE {\n")?;
        for p in &self.patterns {
            writeln!(f, "  {p} .")?;
        }
        f.write_str("}\n")
    }
}

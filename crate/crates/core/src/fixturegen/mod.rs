//! Seeded synthetic webs for testing the engine.
//!
//! A generated directory holds a fixture web (`manifest.tsv`, `docs/`), a
//! query suite (`suite.tsv`, `queries/`) and two answer files:
//! `ground_truth.tsv` with the oracle's answer set per query and setup, and
//! `planted.tsv` with the bindings the generator built each query around.
//! Both use `query-id <TAB> setup <TAB> ?var=term ?var=term ...`.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use oracle::{load_fixture_documents, oracle_eval, oracle_eval_documents, OracleFeatures, OracleStore};

use crate::engine::Setup;
use crate::query::{classify, BgpQuery, PatternTerm, QueryClass, TriplePattern, Variable};
use crate::rdf::{Iri, Literal, Term, Triple};
use crate::vocab;

const PREDICATES: usize = 4;
const CLASSES: usize = 3;

/// Shape of a generated web.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WebSpec {
    pub seed: u64,
    pub entities: usize,
    /// Hops needed to reach an entity's document: 1 serves it directly,
    /// more put a redirect chain in front.
    pub docs_per_entity: usize,
    /// Entities that also get an alias IRI linked by `owl:sameAs`.
    pub sameas: usize,
    /// Hub documents reachable only through `rdfs:seeAlso`.
    pub seealso: usize,
    /// Length of the subproperty and subclass chains.
    pub vocab_depth: usize,
    pub facts_per_doc: usize,
    pub queries_per_class: usize,
    pub base: String,
}

impl Default for WebSpec {
    fn default() -> Self {
        WebSpec {
            seed: 0,
            entities: 24,
            docs_per_entity: 1,
            sameas: 3,
            seealso: 3,
            vocab_depth: 2,
            facts_per_doc: 3,
            queries_per_class: 2,
            base: "http://fixture.example/".to_owned(),
        }
    }
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Extensions a planted binding depends on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Needs {
    pub same_as: bool,
    pub see_also: bool,
    pub rho_df: bool,
}

impl Needs {
    fn union(self, other: Needs) -> Needs {
        Needs {
            same_as: self.same_as || other.same_as,
            see_also: self.see_also || other.see_also,
            rho_df: self.rho_df || other.rho_df,
        }
    }

    pub fn any(self) -> bool {
        self.same_as || self.see_also || self.rho_df
    }

    /// Whether the complete web under `setup`'s reasoning yields the binding.
    pub fn met_by(self, setup: Setup) -> bool {
        let f = setup.features();
        (!self.same_as || f.same_as) && (!self.rho_df || f.rho_df)
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedQuery {
    pub id: String,
    pub class: QueryClass,
    pub query: BgpQuery,
    pub needs: Needs,
    /// The binding the query was built around, per setup whose reasoning
    /// derives it.
    pub planted: BTreeMap<Setup, Vec<Term>>,
}

#[derive(Debug, Clone)]
pub struct GeneratedWeb {
    pub dir: PathBuf,
    pub documents: usize,
    pub queries: Vec<GeneratedQuery>,
    pub ground_truth: BTreeMap<(String, Setup), BTreeSet<Vec<Term>>>,
}

impl GeneratedWeb {
    pub fn suite(&self) -> PathBuf {
        self.dir.join("suite.tsv")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Obj {
    Entity(usize),
    Literal(usize),
}

#[derive(Debug, Clone)]
struct Fact {
    s: usize,
    p: usize,
    o: Obj,
    /// Depth in the subproperty chain of the predicate used in the data.
    level: usize,
    s_alias: bool,
    o_alias: bool,
    hub: Option<usize>,
}

impl Fact {
    fn needs(&self) -> Needs {
        Needs {
            same_as: self.s_alias || self.o_alias,
            see_also: self.hub.is_some(),
            rho_df: self.level > 0,
        }
    }
}

struct Web<'a> {
    spec: &'a WebSpec,
    aliased: Vec<bool>,
    hub_owner: Vec<usize>,
    facts: Vec<Fact>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    types: Vec<(usize, usize)>,
}

fn iri(s: String) -> Term {
    Term::iri(s).expect("generated IRIs are absolute")
}

impl Web<'_> {
    fn entity(&self, i: usize) -> Term {
        if i % 4 == 3 {
            iri(format!("{}e/{i}#it", self.spec.base))
        } else {
            iri(format!("{}e/{i}", self.spec.base))
        }
    }

    fn alias(&self, i: usize) -> Term {
        iri(format!("{}alias/{i}", self.spec.base))
    }

    fn hub(&self, h: usize) -> Term {
        iri(format!("{}hub/{h}", self.spec.base))
    }

    fn pred(&self, j: usize, level: usize) -> Term {
        match level {
            0 => iri(format!("{}p/{j}", self.spec.base)),
            l => iri(format!("{}p/{j}/{l}", self.spec.base)),
        }
    }

    fn class(&self, j: usize, level: usize) -> Term {
        match level {
            0 => iri(format!("{}c/{j}", self.spec.base)),
            l => iri(format!("{}c/{j}/{l}", self.spec.base)),
        }
    }

    fn literal(n: usize) -> Term {
        Term::Literal(Literal::simple(format!("v{n}")))
    }

    /// The value as a query answer: the plain entity IRI, or its alias
    /// when answers are sameAs-canonical.
    fn answer(&self, o: Obj, canonical: bool) -> Term {
        match o {
            Obj::Entity(i) if canonical && self.aliased[i] => self.alias(i),
            Obj::Entity(i) => self.entity(i),
            Obj::Literal(n) => Self::literal(n),
        }
    }

    fn stated_subject(&self, f: &Fact) -> Term {
        if f.s_alias {
            self.alias(f.s)
        } else {
            self.entity(f.s)
        }
    }

    fn stated_object(&self, f: &Fact) -> Term {
        match f.o {
            Obj::Entity(j) if f.o_alias => self.alias(j),
            Obj::Entity(j) => self.entity(j),
            Obj::Literal(n) => Self::literal(n),
        }
    }

    fn build<'s>(spec: &'s WebSpec, rng: &mut ChaCha8Rng) -> Web<'s> {
        let n = spec.entities;
        let mut aliased = vec![false; n];
        for i in rand::seq::index::sample(rng, n, spec.sameas.min(n)) {
            aliased[i] = true;
        }
        let hub_owner: Vec<usize> = (0..spec.seealso).map(|_| rng.gen_range(0..n)).collect();
        let mut hubs_of = vec![Vec::new(); n];
        for (h, &owner) in hub_owner.iter().enumerate() {
            hubs_of[owner].push(h);
        }
        let mut facts: Vec<Fact> = Vec::new();
        let mut seen = BTreeSet::new();
        for s in 0..n {
            for _ in 0..spec.facts_per_doc {
                let p = rng.gen_range(0..PREDICATES);
                let o = if rng.gen_bool(0.8) {
                    let j = rng.gen_range(0..n - 1);
                    Obj::Entity(if j >= s { j + 1 } else { j })
                } else {
                    Obj::Literal(rng.gen_range(0..2 * n))
                };
                let level = if spec.vocab_depth > 0 && rng.gen_bool(0.35) {
                    rng.gen_range(1..=spec.vocab_depth)
                } else {
                    0
                };
                let s_alias = aliased[s] && rng.gen_bool(0.5);
                let o_alias = matches!(o, Obj::Entity(j) if aliased[j]) && rng.gen_bool(0.5);
                let hub = if !hubs_of[s].is_empty() && rng.gen_bool(0.5) {
                    hubs_of[s].choose(rng).copied()
                } else {
                    None
                };
                if seen.insert((s, p, o)) {
                    facts.push(Fact {
                        s,
                        p,
                        o,
                        level,
                        s_alias,
                        o_alias,
                        hub,
                    });
                }
            }
        }
        // every alias and every hub carries at least one fact
        for s in (0..n).filter(|&s| aliased[s]) {
            if !facts.iter().any(|f| f.s == s && f.s_alias) {
                if let Some(f) = facts.iter_mut().find(|f| f.s == s) {
                    f.s_alias = true;
                    f.hub = None;
                }
            }
        }
        for (h, &owner) in hub_owner.iter().enumerate() {
            if !facts.iter().any(|f| f.hub == Some(h)) {
                if let Some(f) = facts.iter_mut().find(|f| f.s == owner && f.hub.is_none() && !f.s_alias) {
                    f.hub = Some(h);
                }
            }
        }
        let types = (0..n)
            .map(|_| {
                let level = if spec.vocab_depth > 0 {
                    rng.gen_range(0..=spec.vocab_depth)
                } else {
                    0
                };
                (rng.gen_range(0..CLASSES), level)
            })
            .collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (k, f) in facts.iter().enumerate() {
            out[f.s].push(k);
            if let Obj::Entity(j) = f.o {
                inc[j].push(k);
            }
        }
        Web {
            spec,
            aliased,
            hub_owner,
            facts,
            out,
            inc,
            types,
        }
    }

    fn documents(&self) -> BTreeMap<Iri, BTreeSet<Triple>> {
        let mut docs: BTreeMap<Iri, BTreeSet<Triple>> = BTreeMap::new();
        let mut put = |doc: &Term, t: Triple| {
            let key = doc.as_iri().expect("documents are named by IRIs").without_fragment();
            docs.entry(key).or_default().insert(t);
        };
        let triple = |s: &Term, p: Term, o: &Term| Triple::new(s.clone(), p, o.clone()).expect("generated triples are well formed");
        let label = |t: &Term, text: String| triple(t, iri(vocab::RDFS_LABEL.into()), &Term::Literal(Literal::simple(text)));
        let v = |s: &str| iri(s.to_owned());

        for f in &self.facts {
            let (s, o) = (self.stated_subject(f), self.stated_object(f));
            let t = triple(&s, self.pred(f.p, f.level), &o);
            match f.hub {
                Some(h) => put(&self.hub(h), t.clone()),
                None => put(&s, t.clone()),
            }
            if o.is_iri() {
                put(&o, t);
            }
        }
        for i in (0..self.spec.entities).filter(|&i| self.aliased[i]) {
            let (e, a) = (self.entity(i), self.alias(i));
            put(&e, triple(&e, v(vocab::OWL_SAMEAS), &a));
            put(&a, triple(&a, v(vocab::OWL_SAMEAS), &e));
        }
        for (h, &owner) in self.hub_owner.iter().enumerate() {
            let (e, hub) = (self.entity(owner), self.hub(h));
            put(&e, triple(&e, v(vocab::RDFS_SEEALSO), &hub));
            put(&hub, label(&hub, format!("hub {h}")));
        }
        for (i, &(j, level)) in self.types.iter().enumerate() {
            let (e, c) = (self.entity(i), self.class(j, level));
            let t = triple(&e, v(vocab::RDF_TYPE), &c);
            put(&e, t.clone());
            put(&c, t);
        }
        let depth = self.spec.vocab_depth;
        for j in 0..PREDICATES {
            put(&self.pred(j, 0), label(&self.pred(j, 0), format!("p{j}")));
            for l in 1..=depth {
                let t = triple(&self.pred(j, l), v(vocab::RDFS_SUBPROPERTYOF), &self.pred(j, l - 1));
                put(&self.pred(j, l), t.clone());
                put(&self.pred(j, l - 1), t);
            }
        }
        for j in 0..CLASSES {
            put(&self.class(j, 0), label(&self.class(j, 0), format!("c{j}")));
            for l in 1..=depth {
                let t = triple(&self.class(j, l), v(vocab::RDFS_SUBCLASSOF), &self.class(j, l - 1));
                put(&self.class(j, l), t.clone());
                put(&self.class(j, l - 1), t);
            }
        }
        if depth > 0 {
            // classes never used in queries, so their instances need not be
            // reachable from anywhere
            let dom = iri(format!("{}c/dom", self.spec.base));
            let rng = iri(format!("{}c/rng", self.spec.base));
            put(&self.pred(0, 0), triple(&self.pred(0, 0), v(vocab::RDFS_DOMAIN), &dom));
            put(&self.pred(1, 0), triple(&self.pred(1, 0), v(vocab::RDFS_RANGE), &rng));
            put(&dom, label(&dom, "dom".into()));
            put(&rng, label(&rng, "rng".into()));
        }
        docs
    }
}

/// A query under construction: patterns, and the witness values of its
/// variables.
struct Draft {
    patterns: Vec<TriplePattern>,
    witness: Vec<(Variable, Obj)>,
    needs: Needs,
}

impl Draft {
    fn new() -> Draft {
        Draft {
            patterns: Vec::new(),
            witness: Vec::new(),
            needs: Needs::default(),
        }
    }

    fn pattern(&mut self, s: PatternTerm, p: Term, o: PatternTerm) {
        self.patterns.push(TriplePattern::new(s, p, o));
    }

    fn bind(&mut self, var: &str, value: Obj) {
        self.witness.push((Variable::new(var), value));
    }

    fn uses(&mut self, f: &Fact) {
        self.needs = self.needs.union(f.needs());
    }
}

fn var(name: &str) -> PatternTerm {
    PatternTerm::var(name)
}

impl Web<'_> {
    fn konst(&self, i: usize) -> PatternTerm {
        PatternTerm::Const(self.entity(i))
    }

    fn pick(&self, rng: &mut ChaCha8Rng, facts: &[usize], entity_object: bool) -> Option<usize> {
        let candidates: Vec<usize> = facts
            .iter()
            .copied()
            .filter(|&k| !entity_object || matches!(self.facts[k].o, Obj::Entity(_)))
            .collect();
        candidates.choose(rng).copied()
    }

    /// Up to `count` facts from `facts` with distinct (predicate, other end).
    fn pick_distinct(&self, rng: &mut ChaCha8Rng, facts: &[usize], count: usize, entity_object: bool) -> Option<Vec<usize>> {
        let mut shuffled: Vec<usize> = facts
            .iter()
            .copied()
            .filter(|&k| !entity_object || matches!(self.facts[k].o, Obj::Entity(_)))
            .collect();
        shuffled.shuffle(rng);
        let chosen: Vec<usize> = shuffled.into_iter().take(count).collect();
        (chosen.len() == count).then_some(chosen)
    }

    fn entity_of(o: Obj) -> Option<usize> {
        match o {
            Obj::Entity(i) => Some(i),
            Obj::Literal(_) => None,
        }
    }

    fn draft(&self, class: QueryClass, a: usize, rng: &mut ChaCha8Rng) -> Option<Draft> {
        let mut d = Draft::new();
        match class {
            QueryClass::EntityS => {
                let f = &self.facts[self.pick(rng, &self.out[a], false)?];
                d.pattern(self.konst(a), self.pred(f.p, 0), var("o"));
                d.bind("o", f.o);
                d.uses(f);
            }
            QueryClass::EntityO => {
                if self.spec.vocab_depth > 0 && rng.gen_bool(0.3) {
                    let (j, level) = self.types[a];
                    d.pattern(var("s"), iri(vocab::RDF_TYPE.into()), PatternTerm::Const(self.class(j, 0)));
                    d.bind("s", Obj::Entity(a));
                    d.needs.rho_df = level > 0;
                } else {
                    let f = &self.facts[self.pick(rng, &self.inc[a], false)?];
                    d.pattern(var("s"), self.pred(f.p, 0), self.konst(a));
                    d.bind("s", Obj::Entity(f.s));
                    d.uses(f);
                }
            }
            QueryClass::EntitySO => {
                let f1 = &self.facts[self.pick(rng, &self.out[a], false)?];
                let f2 = &self.facts[self.pick(rng, &self.inc[a], false)?];
                d.pattern(self.konst(a), self.pred(f1.p, 0), var("o"));
                d.pattern(var("s"), self.pred(f2.p, 0), self.konst(a));
                d.bind("o", f1.o);
                d.bind("s", Obj::Entity(f2.s));
                d.uses(f1);
                d.uses(f2);
            }
            QueryClass::SPath2 | QueryClass::SPath3 => {
                let hops = if class == QueryClass::SPath2 { 2 } else { 3 };
                let mut at = a;
                for h in 1..=hops {
                    let last = h == hops;
                    let f = &self.facts[self.pick(rng, &self.out[at], !last)?];
                    let subject = if h == 1 { self.konst(a) } else { var(&format!("x{}", h - 1)) };
                    let name = format!("x{h}");
                    d.pattern(subject, self.pred(f.p, 0), var(&name));
                    d.bind(&name, f.o);
                    d.uses(f);
                    if !last {
                        at = Self::entity_of(f.o)?;
                    }
                }
            }
            QueryClass::OPath2 | QueryClass::OPath3 => {
                let hops = if class == QueryClass::OPath2 { 2 } else { 3 };
                let mut at = a;
                let mut reversed = Vec::new();
                for h in (0..hops).rev() {
                    let f = &self.facts[self.pick(rng, &self.inc[at], false)?];
                    let object = if h == hops - 1 { self.konst(a) } else { var(&format!("x{}", h + 1)) };
                    let name = format!("x{h}");
                    reversed.push(TriplePattern::new(var(&name), self.pred(f.p, 0), object));
                    d.bind(&name, Obj::Entity(f.s));
                    d.uses(f);
                    at = f.s;
                }
                reversed.reverse();
                d.patterns = reversed;
                d.witness.reverse();
            }
            QueryClass::StarS3 | QueryClass::StarS2O1 | QueryClass::StarS1O1 | QueryClass::StarS1O2 | QueryClass::StarO3 => {
                let (outs, ins) = match class {
                    QueryClass::StarS3 => (3, 0),
                    QueryClass::StarS2O1 => (2, 1),
                    QueryClass::StarS1O1 => (1, 1),
                    QueryClass::StarS1O2 => (1, 2),
                    _ => (0, 3),
                };
                for k in self.pick_distinct(rng, &self.out[a], outs, true)? {
                    let f = &self.facts[k];
                    d.pattern(var("x"), self.pred(f.p, 0), self.konst(Self::entity_of(f.o)?));
                    d.uses(f);
                }
                for k in self.pick_distinct(rng, &self.inc[a], ins, false)? {
                    let f = &self.facts[k];
                    d.pattern(self.konst(f.s), self.pred(f.p, 0), var("x"));
                    d.uses(f);
                }
                d.bind("x", Obj::Entity(a));
            }
            QueryClass::Other => return None,
        }
        Some(d)
    }

    fn queries(&self, rng: &mut ChaCha8Rng) -> Vec<GeneratedQuery> {
        let mut queries = Vec::new();
        for class in QueryClass::TABLE {
            let mut texts = BTreeSet::new();
            for q in 0..self.spec.queries_per_class {
                let mut anchors: Vec<usize> = (0..self.spec.entities).collect();
                anchors.shuffle(rng);
                let mut fallback = None;
                let mut chosen = None;
                for &a in &anchors {
                    let Some(d) = self.draft(class, a, rng) else { continue };
                    let text: Vec<String> = d.patterns.iter().map(ToString::to_string).collect();
                    if texts.contains(&text) {
                        continue;
                    }
                    // alternate between queries that exercise an extension
                    // and whatever comes first
                    if q % 2 == 1 || d.needs.any() {
                        chosen = Some((d, text));
                        break;
                    }
                    fallback.get_or_insert((d, text));
                }
                let Some((d, text)) = chosen.or(fallback) else { continue };
                texts.insert(text);
                let id = format!("{}-{q}", class.name());
                let query = self.finish(&id, d.patterns.clone());
                debug_assert_eq!(classify(&query), class, "{query}");
                let planted = Setup::ALL
                    .into_iter()
                    .filter(|&s| d.needs.met_by(s))
                    .map(|s| {
                        let canonical = s.features().same_as;
                        let row = query
                            .projection
                            .iter()
                            .map(|v| {
                                let (_, o) = d.witness.iter().find(|(w, _)| w == v).expect("every variable has a witness");
                                self.answer(*o, canonical)
                            })
                            .collect();
                        (s, row)
                    })
                    .collect();
                queries.push(GeneratedQuery {
                    id,
                    class,
                    query,
                    needs: d.needs,
                    planted,
                });
            }
        }
        queries
    }

    fn finish(&self, id: &str, patterns: Vec<TriplePattern>) -> BgpQuery {
        let mut projection: Vec<Variable> = Vec::new();
        for v in patterns.iter().flat_map(TriplePattern::variables) {
            if !projection.contains(v) {
                projection.push(v.clone());
            }
        }
        BgpQuery {
            id: id.to_owned(),
            projection,
            patterns,
        }
    }
}

/// `?var=term` pairs separated by spaces.
pub fn format_binding(projection: &[Variable], row: &[Term]) -> String {
    projection
        .iter()
        .zip(row)
        .map(|(v, t)| format!("{v}={t}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn check(spec: &WebSpec) -> Result<(), GenError> {
    let bad = |m: &str| Err(GenError::Spec(m.to_owned()));
    if spec.entities < 2 {
        return bad("at least two entities are needed");
    }
    if spec.docs_per_entity == 0 {
        return bad("docs_per_entity must be at least 1");
    }
    if Iri::new(&spec.base).is_err() || !(spec.base.ends_with('/') || spec.base.ends_with('#')) {
        return bad("base must be an absolute IRI ending in '/' or '#'");
    }
    Ok(())
}

/// Writes the web described by `spec` into `out_dir`. The output is a
/// pure function of `spec`.
pub fn generate_web(spec: &WebSpec, out_dir: impl AsRef<Path>) -> Result<GeneratedWeb, GenError> {
    check(spec)?;
    let dir = out_dir.as_ref().to_path_buf();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let web = Web::build(spec, &mut rng);
    let docs = web.documents();
    let queries = web.queries(&mut rng);

    let write = |rel: &str, text: &str| -> Result<(), GenError> {
        let path = dir.join(rel);
        let io = |source| GenError::Io { path: path.clone(), source };
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        std::fs::write(&path, text).map_err(io)
    };

    let mut manifest = String::new();
    let entity_docs: BTreeSet<Iri> = (0..spec.entities)
        .filter_map(|i| web.entity(i).as_iri().map(Iri::without_fragment))
        .collect();
    for (n, (doc, triples)) in docs.iter().enumerate() {
        let file = format!("docs/d{n:04}.nt");
        let body: String = triples.iter().map(|t| format!("{t}\n")).collect();
        write(&file, &body)?;
        let mut at = doc.as_str().to_owned();
        if entity_docs.contains(doc) {
            for hop in 1..spec.docs_per_entity {
                let next = format!("{}/r{hop}", doc.as_str());
                writeln!(manifest, "{at}\tREDIRECT {next}").unwrap();
                at = next;
            }
        }
        writeln!(manifest, "{at}\tFILE {file}").unwrap();
    }
    write(crate::fetch::MANIFEST_FILE, &manifest)?;

    let mut suite = String::new();
    for q in &queries {
        let rel = format!("queries/{}.rq", q.id);
        write(&rel, &q.query.to_string())?;
        writeln!(suite, "{}\t{rel}", q.id).unwrap();
    }
    write("suite.tsv", &suite)?;

    let stores: BTreeMap<(bool, bool), OracleStore> = [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .map(|(same_as, rho_df)| {
            let features = OracleFeatures { same_as, rho_df };
            let triples: Vec<Vec<Triple>> = docs.values().map(|ts| ts.iter().cloned().collect()).collect();
            ((same_as, rho_df), OracleStore::new(triples.iter().map(Vec::as_slice), features))
        })
        .collect();
    let mut ground_truth = BTreeMap::new();
    let (mut truth_tsv, mut planted_tsv) = (String::new(), String::new());
    for q in &queries {
        for setup in Setup::ALL {
            let f = OracleFeatures::from(setup);
            let answers = stores[&(f.same_as, f.rho_df)].eval(&q.query);
            for row in &answers {
                writeln!(truth_tsv, "{}\t{setup}\t{}", q.id, format_binding(&q.query.projection, row)).unwrap();
            }
            ground_truth.insert((q.id.clone(), setup), answers);
            if let Some(row) = q.planted.get(&setup) {
                writeln!(planted_tsv, "{}\t{setup}\t{}", q.id, format_binding(&q.query.projection, row)).unwrap();
            }
        }
    }
    write("ground_truth.tsv", &truth_tsv)?;
    write("planted.tsv", &planted_tsv)?;

    Ok(GeneratedWeb {
        dir,
        documents: docs.len(),
        queries,
        ground_truth,
    })
}

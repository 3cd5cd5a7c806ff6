use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use crossbeam_channel::{unbounded, Receiver, RecvTimeoutError, Sender};
use log::debug;

use super::eval::Evaluator;
use super::metrics::{collect_metrics, QueryMetrics, RunStats};
use super::policy::{
    initial_targets, policy_targets, predicate_only_variables, EngineOptions, Features, PolicyContext, PolicyEvent,
    Reason, Setup,
};
use crate::fetch::{build_transport, Clock, DerefResult, DerefStatus, FetchConfig, FetchError, Fetcher, SystemClock, Transport};
use crate::query::{BgpQuery, TriplePattern, Variable};
use crate::reasoner::{saturate, EquivalenceClasses, RuleCounts};
use crate::rdf::{Document, Graph, Iri, Term, Triple};
use crate::vocab;

const TICK: Duration = Duration::from_millis(50);
const NO_SOURCE: u32 = u32::MAX;

/// One complete answer, as emitted.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<(Variable, Term)>,
    /// Time since the query started.
    pub elapsed: Duration,
    /// Documents whose triples were joined to produce the answer.
    pub sources: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub iri: Iri,
    pub reason: Reason,
}

/// Everything known once a query has finished.
#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub metrics: QueryMetrics,
    pub projection: Vec<Variable>,
    /// Distinct answers in canonical form, values in projection order.
    pub answers: BTreeSet<Vec<Term>>,
    /// Nontrivial sameAs classes at the end of the run.
    pub equivalences: Vec<Vec<Iri>>,
    /// Successfully retrieved documents, in arrival order.
    pub documents: Vec<Document>,
    /// Dereference decisions in dispatch order.
    pub trace: Vec<TraceEntry>,
    pub rule_counts: RuleCounts,
}

/// A running query: a stream of solutions and, at the end, its outcome.
#[derive(Debug)]
pub struct QueryRun {
    solutions: Receiver<Solution>,
    handle: JoinHandle<QueryOutcome>,
}

impl QueryRun {
    pub fn solutions(&self) -> &Receiver<Solution> {
        &self.solutions
    }

    /// Waits for termination. Solutions not yet received are dropped.
    pub fn wait(self) -> QueryOutcome {
        self.join().expect("query coordinator panicked")
    }

    /// Like [`QueryRun::wait`], reporting a coordinator panic as an error.
    pub fn join(self) -> std::thread::Result<QueryOutcome> {
        self.handle.join()
    }
}

/// Executes queries against one transport. Every query gets a fresh
/// [`Fetcher`], so caches and counters are per query.
#[derive(Debug, Clone)]
pub struct Engine {
    fetch: FetchConfig,
    transport: Arc<dyn Transport>,
    clock: Arc<dyn Clock>,
    options: EngineOptions,
}

impl Engine {
    pub fn new(fetch: FetchConfig) -> Result<Self, FetchError> {
        let clock: Arc<dyn Clock> = Arc::new(SystemClock::new());
        let transport = build_transport(&fetch, clock.clone())?;
        Ok(Self::with_transport(fetch, transport, clock))
    }

    pub fn with_transport(fetch: FetchConfig, transport: Arc<dyn Transport>, clock: Arc<dyn Clock>) -> Self {
        Engine {
            fetch,
            transport,
            clock,
            options: EngineOptions::default(),
        }
    }

    pub fn with_options(mut self, options: EngineOptions) -> Self {
        self.options = options;
        self
    }

    pub fn fetch_config(&self) -> &FetchConfig {
        &self.fetch
    }

    pub fn execute(&self, query: &BgpQuery, setup: Setup) -> QueryRun {
        let (tx, rx) = unbounded();
        let fetcher = Fetcher::with_transport(self.fetch.clone(), self.transport.clone(), self.clock.clone());
        let query = query.clone();
        let clock = self.clock.clone();
        let options = self.options;
        let handle = std::thread::spawn(move || {
            let start = clock.elapsed();
            let mut t = Traversal::new(&query, setup, options, tx, clock, start);
            t.run(&fetcher);
            t.finish(&fetcher)
        });
        QueryRun { solutions: rx, handle }
    }

    /// Executes and waits, discarding the stream.
    pub fn run(&self, query: &BgpQuery, setup: Setup) -> QueryOutcome {
        self.execute(query, setup).wait()
    }
}

/// Executes `query` under `setup` with the resolver named in `config`.
pub fn execute(query: &BgpQuery, setup: Setup, config: &FetchConfig) -> Result<QueryRun, FetchError> {
    Ok(Engine::new(config.clone())?.execute(query, setup))
}

struct Traversal<'q> {
    query: &'q BgpQuery,
    setup: Setup,
    features: Features,
    options: EngineOptions,
    skip_vars: HashSet<Variable>,

    raw: Graph,
    raw_doc: Vec<u32>,
    store: Graph,
    store_doc: Vec<u32>,
    eq: EquivalenceClasses,
    rule_counts: RuleCounts,

    canon_query: BgpQuery,
    eval: Evaluator,
    projection_slots: Vec<usize>,
    answers: HashSet<Vec<Term>>,

    relevant_raw: BTreeSet<Iri>,
    relevant_reps: HashSet<Iri>,
    frontier: VecDeque<(Iri, Reason)>,
    visited: HashSet<Iri>,

    documents: Vec<Document>,
    trace: Vec<TraceEntry>,
    tx: Sender<Solution>,
    clock: Arc<dyn Clock>,
    start: Duration,
    first: Option<Duration>,
    deadline_hit: bool,
}

impl<'q> Traversal<'q> {
    fn new(
        query: &'q BgpQuery,
        setup: Setup,
        options: EngineOptions,
        tx: Sender<Solution>,
        clock: Arc<dyn Clock>,
        start: Duration,
    ) -> Self {
        let (canon_query, eval, projection_slots) = prepare(query, &EquivalenceClasses::new());
        let mut t = Traversal {
            query,
            setup,
            features: setup.features(),
            options,
            skip_vars: predicate_only_variables(query),
            raw: Graph::new(),
            raw_doc: Vec::new(),
            store: Graph::new(),
            store_doc: Vec::new(),
            eq: EquivalenceClasses::new(),
            rule_counts: RuleCounts::default(),
            canon_query,
            eval,
            projection_slots,
            answers: HashSet::new(),
            relevant_raw: BTreeSet::new(),
            relevant_reps: HashSet::new(),
            frontier: VecDeque::new(),
            visited: HashSet::new(),
            documents: Vec::new(),
            trace: Vec::new(),
            tx,
            clock,
            start,
            first: None,
            deadline_hit: false,
        };
        for (iri, reason) in initial_targets(query, setup) {
            t.enqueue(&iri, reason);
            if reason == Reason::Seed {
                t.mark_relevant(&iri);
            }
        }
        t
    }

    fn enqueue(&mut self, iri: &Iri, reason: Reason) {
        let key = iri.without_fragment();
        if self.visited.insert(key.clone()) {
            self.frontier.push_back((key, reason));
        }
    }

    fn canonical(&self, t: &Triple) -> Triple {
        if self.features.same_as {
            self.eq.canonical_triple(t)
        } else {
            t.clone()
        }
    }

    fn representative(&self, iri: &Iri) -> Iri {
        if self.features.same_as {
            self.eq.representative(iri)
        } else {
            iri.clone()
        }
    }

    fn run(&mut self, fetcher: &Fetcher) {
        let workers = fetcher.config().max_parallel.max(1) as usize;
        std::thread::scope(|scope| {
            let (job_tx, job_rx) = unbounded::<Iri>();
            let (res_tx, res_rx) = unbounded::<Arc<DerefResult>>();
            for _ in 0..workers {
                let (job_rx, res_tx) = (job_rx.clone(), res_tx.clone());
                scope.spawn(move || {
                    for iri in job_rx.iter() {
                        if res_tx.send(fetcher.dereference(&iri)).is_err() {
                            break;
                        }
                    }
                });
            }
            drop(res_tx);
            let mut in_flight = 0usize;
            loop {
                if fetcher.remaining().is_zero() {
                    self.deadline_hit = true;
                    break;
                }
                while in_flight < workers {
                    let Some((iri, reason)) = self.frontier.pop_front() else { break };
                    debug!(target: "ltqp::trace", "{iri}\t{reason}\t{}", self.setup);
                    self.trace.push(TraceEntry { iri: iri.clone(), reason });
                    job_tx.send(iri).expect("workers outlive the dispatch loop");
                    in_flight += 1;
                }
                if in_flight == 0 {
                    break;
                }
                match res_rx.recv_timeout(TICK) {
                    Ok(result) => {
                        in_flight -= 1;
                        self.absorb(&result);
                    }
                    Err(RecvTimeoutError::Timeout) => {}
                    Err(RecvTimeoutError::Disconnected) => break,
                }
            }
            drop(job_tx);
            drop(res_rx);
        });
    }

    fn absorb(&mut self, result: &DerefResult) {
        match &result.status {
            DerefStatus::Ok(doc) => {
                let idx = self.documents.len() as u32;
                self.documents.push(doc.clone());
                self.ingest(&doc.triples, idx);
            }
            other => debug!("{}: {other:?}", result.requested),
        }
    }

    fn ingest(&mut self, triples: &[Triple], doc: u32) {
        let raw_from = self.raw.len();
        for t in triples {
            if self.raw.insert(t.clone()) {
                self.raw_doc.push(doc);
            }
        }
        let merged = self.features.same_as && self.eq.absorb(&self.raw.as_slice()[raw_from..]);
        if merged {
            self.rebuild();
            return;
        }
        let store_from = self.store.len();
        for pos in raw_from..self.raw.len() {
            let c = self.canonical(&self.raw.as_slice()[pos]);
            if self.store.insert(c) {
                self.store_doc.push(self.raw_doc[pos]);
            }
        }
        if self.features.rho_df {
            self.rule_counts.add(saturate(&mut self.store, store_from));
            self.store_doc.resize(self.store.len(), doc);
        }
        let added = self.eval.advance(&self.store, store_from);
        self.on_rows(added);
        self.scan_triples(raw_from);
    }

    /// Rebuilds the canonical store and all bindings after classes merged.
    fn rebuild(&mut self) {
        self.store = Graph::new();
        self.store_doc.clear();
        for pos in 0..self.raw.len() {
            let c = self.canonical(&self.raw.as_slice()[pos]);
            if self.store.insert(c) {
                self.store_doc.push(self.raw_doc[pos]);
            }
        }
        if self.features.rho_df {
            self.rule_counts = saturate(&mut self.store, 0);
            self.store_doc.resize(self.store.len(), NO_SOURCE);
        }
        let (canon_query, eval, slots) = prepare(self.query, &self.eq);
        self.canon_query = canon_query;
        self.eval = eval;
        self.projection_slots = slots;
        self.answers = self.answers.iter().map(|row| self.eq.canonical_row(row)).collect();
        self.relevant_reps.clear();
        for iri in std::mem::take(&mut self.relevant_raw) {
            self.mark_relevant(&iri);
        }
        let added = self.eval.advance(&self.store, 0);
        self.on_rows(added);
        self.scan_triples(0);
    }

    fn mark_relevant(&mut self, iri: &Iri) {
        self.relevant_raw.insert(iri.clone());
        let rep = self.representative(iri);
        if !self.relevant_reps.insert(rep.clone()) {
            return;
        }
        let members = if self.features.same_as {
            self.eq.members(&rep)
        } else {
            vec![rep]
        };
        for m in &members {
            if self.features.same_as {
                self.enqueue(m, Reason::SameAsLink);
            }
            if self.features.see_also {
                let see_also = Term::iri(vocab::RDFS_SEEALSO).expect("vocabulary IRIs are absolute");
                let links: Vec<Iri> = self
                    .raw
                    .matching(Some(&Term::Iri(m.clone())), Some(&see_also), None, 0..self.raw.len())
                    .filter_map(|t| t.object().as_iri().cloned())
                    .collect();
                for target in links {
                    self.enqueue(&target, Reason::SeeAlsoLink);
                }
            }
        }
    }

    fn on_rows(&mut self, added: Vec<std::ops::Range<usize>>) {
        let last = self.eval.depth() - 1;
        for (level, range) in added.into_iter().enumerate() {
            for i in range {
                let row = &self.eval.rows(level)[i];
                let binding: Vec<(Variable, Term)> = self
                    .eval
                    .variables()
                    .iter()
                    .zip(&row.values)
                    .filter_map(|(v, val)| val.clone().map(|t| (v.clone(), t)))
                    .collect();
                let complete = (level == last).then(|| {
                    let values: Vec<Term> = self
                        .projection_slots
                        .iter()
                        .map(|&s| row.values[s].clone().expect("complete rows bind every variable"))
                        .collect();
                    let sources: BTreeSet<Iri> = row
                        .support
                        .iter()
                        .filter_map(|&p| self.store_doc.get(p as usize))
                        .filter(|&&d| d != NO_SOURCE)
                        .map(|&d| self.documents[d as usize].source.clone())
                        .collect();
                    (values, sources)
                });
                for (var, value) in &binding {
                    if let (false, Term::Iri(iri)) = (self.skip_vars.contains(var), value) {
                        self.mark_relevant(iri);
                    }
                }
                let targets = {
                    let relevant = |i: &Iri| self.relevant_reps.contains(&self.representative(i));
                    let ctx = PolicyContext {
                        query: &self.canon_query,
                        relevant: &relevant,
                        options: self.options,
                    };
                    policy_targets(PolicyEvent::Binding(&binding), self.setup, &ctx)
                };
                for (iri, reason) in targets {
                    self.enqueue(&iri, reason);
                }
                if let Some((values, sources)) = complete {
                    self.emit(values, sources);
                }
            }
        }
    }

    fn emit(&mut self, values: Vec<Term>, sources: BTreeSet<Iri>) {
        if !self.answers.insert(values.clone()) {
            return;
        }
        let elapsed = self.clock.elapsed().saturating_sub(self.start);
        self.first.get_or_insert(elapsed);
        let solution = Solution {
            values: self.query.projection.iter().cloned().zip(values).collect(),
            elapsed,
            sources,
        };
        // the consumer may have stopped listening
        let _ = self.tx.send(solution);
    }

    fn scan_triples(&mut self, from: usize) {
        let targets: Vec<(Iri, Reason)> = {
            let relevant = |i: &Iri| self.relevant_reps.contains(&self.representative(i));
            let ctx = PolicyContext {
                query: &self.canon_query,
                relevant: &relevant,
                options: self.options,
            };
            self.raw.as_slice()[from..]
                .iter()
                .flat_map(|raw| {
                    let canonical = self.canonical(raw);
                    policy_targets(PolicyEvent::Triple { raw, canonical: &canonical }, self.setup, &ctx)
                })
                .collect()
        };
        for (iri, reason) in targets {
            self.enqueue(&iri, reason);
        }
    }

    fn finish(self, fetcher: &Fetcher) -> QueryOutcome {
        let inferred = self.store.iter().filter(|t| !self.raw.contains(t)).count() as u64;
        let answers: BTreeSet<Vec<Term>> = self.answers.into_iter().collect();
        let stats = RunStats {
            results: answers.len() as u64,
            elapsed: self.clock.elapsed().saturating_sub(self.start),
            first: self.first,
            inferred,
            truncated: self.deadline_hit || fetcher.deadline_exceeded(),
        };
        QueryOutcome {
            metrics: collect_metrics(self.query, self.setup, &stats, fetcher),
            projection: self.query.projection.clone(),
            answers,
            equivalences: self.eq.classes(),
            documents: self.documents,
            trace: self.trace,
            rule_counts: self.rule_counts,
        }
    }
}

/// Canonicalizes the query's constants, orders its patterns for
/// evaluation and locates the projected variables.
fn prepare(query: &BgpQuery, eq: &EquivalenceClasses) -> (BgpQuery, Evaluator, Vec<usize>) {
    let canon_query = BgpQuery {
        id: query.id.clone(),
        projection: query.projection.clone(),
        patterns: query.patterns.iter().map(|p| eq.canonical_pattern(p)).collect(),
    };
    let ordered: Vec<TriplePattern> = canon_query
        .evaluation_order()
        .into_iter()
        .map(|i| canon_query.patterns[i].clone())
        .collect();
    let eval = Evaluator::new(&ordered);
    let slots = query
        .projection
        .iter()
        .map(|v| {
            eval.variables()
                .iter()
                .position(|x| x == v)
                .expect("projected variables occur in the patterns")
        })
        .collect();
    (canon_query, eval, slots)
}

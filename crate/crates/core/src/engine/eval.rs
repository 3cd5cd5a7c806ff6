//! Incremental BGP evaluation over an append-only graph.
//!
//! For patterns `t1..tn` in evaluation order, level `k` holds the distinct
//! bindings of `t1..tk`. When the graph grows from `old` to `new` triples
//! only the delta is joined:
//!
//! ```text
//! ΔL_k = (L_{k-1} before this round ⋈ t_k over old..new) ∪ (ΔL_{k-1} ⋈ t_k over 0..new)
//! ```

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use crate::query::{PatternTerm, TriplePattern, Variable};
use crate::rdf::{Graph, Term};

#[derive(Debug, Clone, Copy)]
enum Slot {
    Const(usize),
    Var(usize),
}

/// A partial binding: values indexed by variable number, plus the graph
/// positions of the triples that produced it.
#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub values: Vec<Option<Term>>,
    pub support: Vec<u32>,
}

#[derive(Debug)]
pub(crate) struct Evaluator {
    variables: Vec<Variable>,
    consts: Vec<Term>,
    slots: Vec<[Slot; 3]>,
    levels: Vec<Vec<Row>>,
    seen: Vec<HashSet<Vec<Option<Term>>>>,
    started: bool,
}

impl Evaluator {
    /// `patterns` must already be in evaluation order.
    pub fn new(patterns: &[TriplePattern]) -> Self {
        let mut var_ids: HashMap<Variable, usize> = HashMap::new();
        let mut variables = Vec::new();
        let mut consts = Vec::new();
        let slots = patterns
            .iter()
            .map(|p| {
                p.positions().map(|pos| match pos {
                    PatternTerm::Var(v) => Slot::Var(*var_ids.entry(v.clone()).or_insert_with(|| {
                        variables.push(v.clone());
                        variables.len() - 1
                    })),
                    PatternTerm::Const(c) => {
                        consts.push(c.clone());
                        Slot::Const(consts.len() - 1)
                    }
                })
            })
            .collect();
        Evaluator {
            variables,
            consts,
            slots,
            levels: vec![Vec::new(); patterns.len()],
            seen: vec![HashSet::new(); patterns.len()],
            started: false,
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn depth(&self) -> usize {
        self.slots.len()
    }

    pub fn rows(&self, level: usize) -> &[Row] {
        &self.levels[level]
    }

    /// Joins in the triples at `graph[old_len..]`. Returns, per level, the
    /// index range of the rows added.
    pub fn advance(&mut self, graph: &Graph, old_len: usize) -> Vec<Range<usize>> {
        let new_len = graph.len();
        let empty = Row {
            values: vec![None; self.variables.len()],
            support: Vec::new(),
        };
        let first = !self.started;
        self.started = true;
        let mut added: Vec<Range<usize>> = Vec::with_capacity(self.depth());
        for k in 0..self.depth() {
            let (done, rest) = self.levels.split_at_mut(k);
            let level = &mut rest[0];
            let before = level.len();
            let mut fresh = Vec::new();
            let mut join = |row: &Row, range: Range<usize>| {
                extend(graph, self.slots[k], &self.consts, &mut self.seen[k], row, range, &mut fresh)
            };
            match done.last() {
                None if first => join(&empty, 0..new_len),
                None => join(&empty, old_len..new_len),
                Some(prev) => {
                    let split = added[k - 1].start;
                    for row in &prev[..split] {
                        join(row, old_len..new_len);
                    }
                    for row in &prev[split..] {
                        join(row, 0..new_len);
                    }
                }
            }
            level.extend(fresh);
            added.push(before..level.len());
        }
        added
    }
}

fn extend(
    graph: &Graph,
    slots: [Slot; 3],
    consts: &[Term],
    seen: &mut HashSet<Vec<Option<Term>>>,
    row: &Row,
    range: Range<usize>,
    out: &mut Vec<Row>,
) {
    let bound: [Option<&Term>; 3] = slots.map(|s| match s {
        Slot::Const(c) => Some(&consts[c]),
        Slot::Var(v) => row.values[v].as_ref(),
    });
    for (pos, t) in graph.matching_indexed(bound[0], bound[1], bound[2], range) {
        let mut values = row.values.clone();
        let consistent = slots.iter().zip(t.terms()).all(|(slot, term)| match *slot {
            Slot::Const(_) => true,
            Slot::Var(v) => match &values[v] {
                Some(existing) => existing == term,
                None => {
                    values[v] = Some(term.clone());
                    true
                }
            },
        });
        if consistent && seen.insert(values.clone()) {
            let mut support = row.support.clone();
            support.push(pos as u32);
            out.push(Row { values, support });
        }
    }
}

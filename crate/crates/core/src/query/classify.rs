use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::{BgpQuery, PatternTerm, TriplePattern, Variable};

/// Structural family of a benchmark query.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum QueryClass {
    #[serde(rename = "entity-s")]
    EntityS,
    #[serde(rename = "entity-o")]
    EntityO,
    #[serde(rename = "entity-so")]
    EntitySO,
    #[serde(rename = "s-path-2")]
    SPath2,
    #[serde(rename = "o-path-2")]
    OPath2,
    #[serde(rename = "s-path-3")]
    SPath3,
    #[serde(rename = "o-path-3")]
    OPath3,
    #[serde(rename = "star-s3")]
    StarS3,
    #[serde(rename = "star-s2-o1")]
    StarS2O1,
    #[serde(rename = "star-s1-o1")]
    StarS1O1,
    #[serde(rename = "star-s1-o2")]
    StarS1O2,
    #[serde(rename = "star-o3")]
    StarO3,
    #[serde(rename = "other")]
    Other,
}

impl QueryClass {
    /// The twelve grouped classes, in table order (excludes `Other`).
    pub const TABLE: [QueryClass; 12] = [
        QueryClass::EntityS,
        QueryClass::EntityO,
        QueryClass::EntitySO,
        QueryClass::SPath2,
        QueryClass::OPath2,
        QueryClass::SPath3,
        QueryClass::OPath3,
        QueryClass::StarS3,
        QueryClass::StarS2O1,
        QueryClass::StarS1O1,
        QueryClass::StarS1O2,
        QueryClass::StarO3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QueryClass::EntityS => "entity-s",
            QueryClass::EntityO => "entity-o",
            QueryClass::EntitySO => "entity-so",
            QueryClass::SPath2 => "s-path-2",
            QueryClass::OPath2 => "o-path-2",
            QueryClass::SPath3 => "s-path-3",
            QueryClass::OPath3 => "o-path-3",
            QueryClass::StarS3 => "star-s3",
            QueryClass::StarS2O1 => "star-s2-o1",
            QueryClass::StarS1O1 => "star-s1-o1",
            QueryClass::StarS1O2 => "star-s1-o2",
            QueryClass::StarO3 => "star-o3",
            QueryClass::Other => "other",
        }
    }
}

impl fmt::Display for QueryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QueryClass::TABLE
            .into_iter()
            .chain([QueryClass::Other])
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown query class {s:?}"))
    }
}

/// Classifies a query by the shape of its patterns. Pattern order in the
/// query text does not matter.
pub fn classify(q: &BgpQuery) -> QueryClass {
    let ps = &q.patterns;
    match ps.len() {
        1 => {
            let p = &ps[0];
            let pred_ok = match &p.predicate {
                PatternTerm::Const(_) => true,
                PatternTerm::Var(v) => Some(v) != p.subject.as_var() && Some(v) != p.object.as_var(),
            };
            if !pred_ok {
                QueryClass::Other
            } else if p.subject.is_const() && p.object.is_var() {
                QueryClass::EntityS
            } else if p.subject.is_var() && p.object.is_const() {
                QueryClass::EntityO
            } else {
                QueryClass::Other
            }
        }
        2 => {
            if is_entity_so(&ps[0], &ps[1]) || is_entity_so(&ps[1], &ps[0]) {
                QueryClass::EntitySO
            } else if any_order(ps, is_s_path) {
                QueryClass::SPath2
            } else if any_order(ps, is_o_path) {
                QueryClass::OPath2
            } else {
                star_class(ps)
            }
        }
        3 => {
            if any_order(ps, is_s_path) {
                QueryClass::SPath3
            } else if any_order(ps, is_o_path) {
                QueryClass::OPath3
            } else {
                star_class(ps)
            }
        }
        _ => QueryClass::Other,
    }
}

/// ⟨e ?a ?b⟩ and ⟨?c ?d e⟩ with no variable shared between them.
fn is_entity_so(out: &TriplePattern, inc: &TriplePattern) -> bool {
    let (Some(e1), Some(e2)) = (out.subject.as_const(), inc.object.as_const()) else {
        return false;
    };
    if e1 != e2 || !e1.is_iri() || !out.object.is_var() || !inc.subject.is_var() {
        return false;
    }
    let mut vars: Vec<&Variable> = out.variables().chain(inc.variables()).collect();
    let n = vars.len();
    vars.sort();
    vars.dedup();
    vars.len() == n
}

fn any_order(ps: &[TriplePattern], shape: fn(&[&TriplePattern]) -> bool) -> bool {
    permutations(ps.len()).into_iter().any(|perm| {
        let ordered: Vec<&TriplePattern> = perm.iter().map(|&i| &ps[i]).collect();
        shape(&ordered)
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for perm in permutations(n - 1) {
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

/// Chain ⟨c p1 ?x1⟩ ⟨?x1 p2 ?x2⟩ ... with fresh variables along the chain.
fn is_s_path(ps: &[&TriplePattern]) -> bool {
    if !ps.iter().all(|p| p.predicate.is_const()) || !ps[0].subject.is_const() {
        return false;
    }
    let chain: Option<Vec<&Variable>> = ps.iter().map(|p| p.object.as_var()).collect();
    let Some(chain) = chain else { return false };
    chain_is_fresh(&chain) && ps.windows(2).zip(&chain).all(|(w, v)| w[1].subject.as_var() == Some(*v))
}

/// Chain ⟨?x0 p1 ?x1⟩ ... ⟨?x(k-1) pk c⟩ built toward a constant object.
fn is_o_path(ps: &[&TriplePattern]) -> bool {
    let last = ps.len() - 1;
    if !ps.iter().all(|p| p.predicate.is_const()) || !ps[last].object.is_const() {
        return false;
    }
    let chain: Option<Vec<&Variable>> = ps.iter().map(|p| p.subject.as_var()).collect();
    let Some(chain) = chain else { return false };
    chain_is_fresh(&chain) && ps.windows(2).zip(&chain[1..]).all(|(w, v)| w[0].object.as_var() == Some(*v))
}

fn chain_is_fresh(chain: &[&Variable]) -> bool {
    let mut sorted = chain.to_vec();
    sorted.sort();
    sorted.dedup();
    sorted.len() == chain.len()
}

/// One join variable; every other position constant.
fn star_class(ps: &[TriplePattern]) -> QueryClass {
    let Some(join) = ps[0].variables().next() else {
        return QueryClass::Other;
    };
    let (mut subj, mut obj) = (0, 0);
    for p in ps {
        if !p.predicate.is_const() {
            return QueryClass::Other;
        }
        match (p.subject.as_var(), p.object.as_var()) {
            (Some(v), None) if v == join => subj += 1,
            (None, Some(v)) if v == join => obj += 1,
            _ => return QueryClass::Other,
        }
    }
    match (subj, obj) {
        (3, 0) => QueryClass::StarS3,
        (2, 1) => QueryClass::StarS2O1,
        (1, 1) => QueryClass::StarS1O1,
        (1, 2) => QueryClass::StarS1O2,
        (0, 3) => QueryClass::StarO3,
        _ => QueryClass::Other,
    }
}

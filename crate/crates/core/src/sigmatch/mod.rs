//! Signature matching: pairing requirement methods with provided methods by
//! their types alone.
//!
//! Method names never block a match; they only break ties between
//! assignments of equal strength.

mod assign;

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{Interface, MethodSig, Model, TypeDecl};

use assign::min_cost_assignment;

/// Reflexive-transitive subtype order over declared types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeLattice {
    parent: BTreeMap<String, String>,
}

impl TypeLattice {
    /// The supertype graph must be acyclic, which resolution guarantees.
    pub fn new<'a>(types: impl IntoIterator<Item = &'a TypeDecl>) -> Self {
        TypeLattice {
            parent: types
                .into_iter()
                .filter_map(|t| t.supertype.clone().map(|s| (t.name.clone(), s)))
                .collect(),
        }
    }

    pub fn from_model(model: &Model) -> Self {
        Self::new(model.types.values())
    }

    /// `sub <: sup`.
    pub fn le(&self, sub: &str, sup: &str) -> bool {
        let mut cur = sub;
        let mut steps = 0;
        loop {
            if cur == sup {
                return true;
            }
            match self.parent.get(cur) {
                Some(p) if steps <= self.parent.len() => {
                    cur = p;
                    steps += 1;
                }
                _ => return false,
            }
        }
    }

    /// Absent return types form a unit type equal only to itself.
    fn le_ret(&self, sub: &Option<String>, sup: &Option<String>) -> bool {
        match (sub, sup) {
            (None, None) => true,
            (Some(a), Some(b)) => self.le(a, b),
            _ => false,
        }
    }
}

/// Ordered weakest first, so `max` picks the strongest kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchKind {
    Specialized,
    Generalized,
    Permuted,
    Exact,
}

impl MatchKind {
    /// Strongest first.
    pub const ALL: [MatchKind; 4] = [
        MatchKind::Exact,
        MatchKind::Permuted,
        MatchKind::Generalized,
        MatchKind::Specialized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatchKind::Exact => "exact",
            MatchKind::Permuted => "permuted",
            MatchKind::Generalized => "generalized",
            MatchKind::Specialized => "specialized",
        }
    }

    fn penalty(self) -> i64 {
        MatchKind::Exact as i64 - self as i64
    }
}

impl fmt::Display for MatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodMatch {
    pub query_method: String,
    pub provided_method: String,
    pub kind: MatchKind,
    /// `query.params[i]` corresponds to `provided.params[permutation[i]]`.
    pub permutation: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMatch {
    /// Total on the query methods, injective on provided methods.
    pub method_map: BTreeMap<String, MethodMatch>,
    /// Weakest kind among the entries.
    pub overall_kind: MatchKind,
}

impl ModuleMatch {
    /// Query method name to provided method name.
    pub fn renaming(&self) -> BTreeMap<String, String> {
        self.method_map
            .iter()
            .map(|(q, m)| (q.clone(), m.provided_method.clone()))
            .collect()
    }

    pub fn same_name_count(&self) -> usize {
        self.method_map.values().filter(|m| m.query_method == m.provided_method).count()
    }
}

/// Best assignment covering as many query methods as possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatch {
    pub method_map: BTreeMap<String, MethodMatch>,
    /// Query methods left without a partner, in declaration order.
    pub unmatched: Vec<String>,
}

fn permutation_to(q: &[&str], p: &[&str]) -> Option<Vec<usize>> {
    let mut used = vec![false; p.len()];
    let mut perm = Vec::with_capacity(q.len());
    for ty in q {
        let j = (0..p.len()).find(|&j| !used[j] && p[j] == *ty)?;
        used[j] = true;
        perm.push(j);
    }
    Some(perm)
}

/// Strongest kind under which `p` can stand in for `q`, if any.
pub fn match_method(q: &MethodSig, p: &MethodSig, lattice: &TypeLattice) -> Option<MethodMatch> {
    if q.params.len() != p.params.len() {
        return None;
    }
    let qt: Vec<&str> = q.param_types().collect();
    let pt: Vec<&str> = p.param_types().collect();
    let identity: Vec<usize> = (0..qt.len()).collect();
    let found = |kind, permutation| {
        Some(MethodMatch {
            query_method: q.name.clone(),
            provided_method: p.name.clone(),
            kind,
            permutation,
        })
    };
    if qt == pt && q.ret == p.ret {
        return found(MatchKind::Exact, identity);
    }
    if q.ret == p.ret {
        if let Some(perm) = permutation_to(&qt, &pt) {
            return found(MatchKind::Permuted, perm);
        }
    }
    // Relaxed kinds compare positionally; equality everywhere was exact.
    let general = qt.iter().zip(&pt).all(|(a, b)| lattice.le(a, b)) && lattice.le_ret(&p.ret, &q.ret);
    if general {
        return found(MatchKind::Generalized, identity);
    }
    let special = qt.iter().zip(&pt).all(|(a, b)| lattice.le(b, a)) && lattice.le_ret(&q.ret, &p.ret);
    if special {
        return found(MatchKind::Specialized, identity);
    }
    None
}

struct Table {
    /// `pairs[i][j]`: match of query method i with provided method j.
    pairs: Vec<Vec<Option<MethodMatch>>>,
    n: usize,
    m: usize,
}

impl Table {
    fn new(q: &Interface, p: &Interface, lattice: &TypeLattice) -> Self {
        Table {
            pairs: q
                .methods
                .iter()
                .map(|qm| p.methods.iter().map(|pm| match_method(qm, pm, lattice)).collect())
                .collect(),
            n: q.methods.len(),
            m: p.methods.len(),
        }
    }

    /// Allowed pairs cost `name mismatch * (3n + 1) + kind penalty`, so a
    /// single extra verbatim name outweighs any difference in kinds. Other
    /// pairs cost more than every allowed assignment combined, so the
    /// minimum covers as many rows as possible.
    fn solve(&self, threshold: MatchKind) -> Vec<MethodMatch> {
        let k = self.n.max(self.m) as i64;
        let name_weight = 3 * k + 1;
        let forbidden = k * (name_weight + 3) + 1;
        let cost = |i: usize, j: usize| match &self.pairs[i][j] {
            Some(mm) if mm.kind >= threshold => {
                let mismatch = i64::from(mm.query_method != mm.provided_method);
                mismatch * name_weight + mm.kind.penalty()
            }
            _ => forbidden,
        };
        let chosen: Vec<(usize, usize)> = if self.n <= self.m {
            let matrix: Vec<Vec<i64>> = (0..self.n).map(|i| (0..self.m).map(|j| cost(i, j)).collect()).collect();
            min_cost_assignment(&matrix, self.m).into_iter().enumerate().collect()
        } else {
            let matrix: Vec<Vec<i64>> = (0..self.m).map(|j| (0..self.n).map(|i| cost(i, j)).collect()).collect();
            min_cost_assignment(&matrix, self.n)
                .into_iter()
                .enumerate()
                .map(|(j, i)| (i, j))
                .collect()
        };
        chosen
            .into_iter()
            .filter(|&(i, j)| cost(i, j) < forbidden)
            .filter_map(|(i, j)| self.pairs[i][j].clone())
            .collect()
    }
}

/// Injective assignment of every query method to a provided method, with the
/// strongest achievable weakest link. `None` if some query method cannot be
/// matched.
pub fn match_module(q: &Interface, p: &Interface, lattice: &TypeLattice) -> Option<ModuleMatch> {
    if q.methods.is_empty() {
        return Some(ModuleMatch {
            method_map: BTreeMap::new(),
            overall_kind: MatchKind::Exact,
        });
    }
    if q.methods.len() > p.methods.len() {
        return None;
    }
    let table = Table::new(q, p, lattice);
    if table.pairs.iter().any(|row| row.iter().all(Option::is_none)) {
        return None;
    }
    for threshold in MatchKind::ALL {
        let chosen = table.solve(threshold);
        if chosen.len() == q.methods.len() {
            let overall_kind = chosen.iter().map(|m| m.kind).min().unwrap_or(MatchKind::Exact);
            return Some(ModuleMatch {
                method_map: chosen.into_iter().map(|m| (m.query_method.clone(), m)).collect(),
                overall_kind,
            });
        }
    }
    None
}

/// Maximum-cardinality assignment of query methods, preferring verbatim
/// names and then stronger kinds.
pub fn match_partial(q: &Interface, p: &Interface, lattice: &TypeLattice) -> PartialMatch {
    let chosen = Table::new(q, p, lattice).solve(MatchKind::Specialized);
    let method_map: BTreeMap<String, MethodMatch> =
        chosen.into_iter().map(|m| (m.query_method.clone(), m)).collect();
    let unmatched = q
        .methods
        .iter()
        .filter(|m| !method_map.contains_key(&m.name))
        .map(|m| m.name.clone())
        .collect();
    PartialMatch { method_map, unmatched }
}

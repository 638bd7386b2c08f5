//! The two-level matching pipeline: keyword prefilter, signature matching,
//! then trace inclusion of the renamed requirement protocol in each
//! candidate's provided protocol.

mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Ratio;

use crate::exec::Execution;
use crate::model::{Interface, Model};
use crate::protocol::{compile_over, includes_bounded, minimal_dfa, Inclusion, ProtocolError, ProtocolExpr, Trace,
    DEFAULT_STATE_LIMIT};
use crate::repo::{split_words, CompiledIndex, IndexEntry};
use crate::sigmatch::{match_method, match_module, match_partial, MatchKind, MethodMatch, TypeLattice};

pub use report::{explain, render_json, render_text};

/// A business requirement: the interface to realize and, optionally, the
/// call orders it must support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Requirement {
    pub iface: Interface,
    pub protocol: Option<ProtocolExpr>,
    pub keywords: BTreeSet<String>,
}

impl Requirement {
    /// Keywords default to the words of the interface and method names.
    pub fn new(iface: Interface, protocol: Option<ProtocolExpr>) -> Self {
        let keywords = std::iter::once(iface.name.as_str())
            .chain(iface.methods.iter().map(|m| m.name.as_str()))
            .flat_map(split_words)
            .collect();
        Requirement {
            iface,
            protocol,
            keywords,
        }
    }

    /// Picks the requirement out of a resolved requirement unit. `name` may
    /// be a contract (interface plus protocol) or an interface (no protocol).
    /// Without a name the unit must declare exactly one contract, or no
    /// contract and exactly one interface.
    pub fn from_model(model: &Model, name: Option<&str>) -> Result<Self, String> {
        let of_contract = |c: &crate::model::Contract| Requirement::new(c.iface.clone(), c.protocol.clone());
        match name {
            Some(n) => {
                if let Some(c) = model.contract(n) {
                    Ok(of_contract(c))
                } else if let Some(i) = model.interface(n) {
                    Ok(Requirement::new(i.clone(), None))
                } else {
                    Err(format!("no contract or interface named `{n}` in the requirement"))
                }
            }
            None => match (model.contracts.len(), model.interfaces.len()) {
                (1, _) => Ok(of_contract(model.contracts.values().next().unwrap())),
                (0, 1) => Ok(Requirement::new(model.interfaces.values().next().unwrap().clone(), None)),
                (0, 0) => Err("the requirement declares no interface".into()),
                _ => Err("the requirement declares several candidates; name one explicitly".into()),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ProtocolVerdict {
    Holds,
    Fails,
    NotChecked,
}

impl ProtocolVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolVerdict::Holds => "HOLDS",
            ProtocolVerdict::Fails => "FAILS",
            ProtocolVerdict::NotChecked => "NOT_CHECKED",
        }
    }

    pub fn weight(self) -> Ratio<i64> {
        match self {
            ProtocolVerdict::Holds => Ratio::from_integer(1),
            ProtocolVerdict::NotChecked => Ratio::new(1, 2),
            ProtocolVerdict::Fails => Ratio::from_integer(0),
        }
    }
}

/// Declaration order is rank order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Use,
    AdaptCandidate,
    NoMatch,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Use => "USE",
            Verdict::AdaptCandidate => "ADAPT_CANDIDATE",
            Verdict::NoMatch => "NO_MATCH",
        }
    }
}

pub fn kind_weight(kind: MatchKind) -> Ratio<i64> {
    match kind {
        MatchKind::Exact => Ratio::from_integer(1),
        MatchKind::Permuted => Ratio::new(4, 5),
        MatchKind::Generalized => Ratio::new(3, 5),
        MatchKind::Specialized => Ratio::new(2, 5),
    }
}

/// `1/2 kind + 3/10 name overlap + 1/5 protocol`.
pub fn score(kind: Ratio<i64>, name_overlap: Ratio<i64>, protocol: ProtocolVerdict) -> Ratio<i64> {
    Ratio::new(1, 2) * kind + Ratio::new(3, 10) * name_overlap + Ratio::new(1, 5) * protocol.weight()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub component: String,
    /// Weakest kind among the matched methods.
    pub kind: Option<MatchKind>,
    /// Requirement method to its partner; total when `complete`.
    pub method_map: BTreeMap<String, MethodMatch>,
    pub complete: bool,
    /// Requirement methods without a partner, in declaration order.
    pub unmatched: Vec<String>,
    /// Unmatched methods whose name the component provides with an
    /// incompatible signature.
    pub contradictory: Vec<String>,
    pub protocol: ProtocolVerdict,
    /// In requirement method names.
    pub counterexample: Option<Trace>,
    pub verdict: Verdict,
    pub score: Ratio<i64>,
    /// Signatures of the requirement methods, for explanations.
    pub signatures: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recommendation {
    Use(String),
    Adapt(String),
    New,
}

impl fmt::Display for Recommendation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recommendation::Use(c) => write!(f, "USE {c}"),
            Recommendation::Adapt(c) => write!(f, "ADAPT {c}"),
            Recommendation::New => f.write_str("NEW"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub requirement: String,
    pub reports: Vec<MatchReport>,
    pub recommendation: Recommendation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchOptions {
    pub prefilter: bool,
    pub state_limit: usize,
    pub execution: Execution,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions {
            prefilter: true,
            state_limit: DEFAULT_STATE_LIMIT,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("component `{component}`: {source}")]
pub struct MatchError {
    pub component: String,
    #[source]
    pub source: ProtocolError,
}

/// Components sharing a keyword with the requirement; all of them when the
/// requirement has no keywords.
pub fn prefilter<'a>(req: &Requirement, entries: &'a [IndexEntry]) -> Vec<&'a IndexEntry> {
    entries
        .iter()
        .filter(|e| req.keywords.is_empty() || !e.keywords.is_disjoint(&req.keywords))
        .collect()
}

fn fraction(part: usize, whole: usize) -> Ratio<i64> {
    if whole == 0 {
        Ratio::from_integer(1)
    } else {
        Ratio::new(part as i64, whole as i64)
    }
}

/// Matches one requirement against one index entry.
pub fn match_entry(
    req: &Requirement,
    entry: &IndexEntry,
    lattice: &TypeLattice,
    state_limit: usize,
) -> Result<MatchReport, MatchError> {
    let n = req.iface.methods.len();
    let signatures = req.iface.methods.iter().map(|m| (m.name.clone(), m.to_string())).collect();
    let mut report = MatchReport {
        component: entry.component.clone(),
        kind: None,
        method_map: BTreeMap::new(),
        complete: false,
        unmatched: Vec::new(),
        contradictory: Vec::new(),
        protocol: ProtocolVerdict::NotChecked,
        counterexample: None,
        verdict: Verdict::NoMatch,
        score: Ratio::from_integer(0),
        signatures,
    };
    if let Some(mm) = match_module(&req.iface, &entry.provided, lattice) {
        let names = fraction(mm.same_name_count(), n);
        report.kind = Some(mm.overall_kind);
        report.complete = true;
        report.method_map = mm.method_map.clone();
        if let Some(protocol) = &req.protocol {
            let renaming = mm.renaming();
            let back: BTreeMap<&str, &str> = renaming.iter().map(|(q, p)| (p.as_str(), q.as_str())).collect();
            let renamed = protocol.rename(&|m| renaming.get(m).cloned().unwrap_or_else(|| m.to_string()));
            let wrap = |source| MatchError {
                component: entry.component.clone(),
                source,
            };
            let required = minimal_dfa(
                &compile_over(&renamed, entry.provided.methods.iter().map(|m| m.name.as_str())),
                state_limit,
            )
            .map_err(wrap)?;
            match includes_bounded(&required, &entry.provided_dfa, state_limit).map_err(wrap)? {
                Inclusion::Holds => report.protocol = ProtocolVerdict::Holds,
                Inclusion::Fails(trace) => {
                    report.protocol = ProtocolVerdict::Fails;
                    report.counterexample = Some(Trace::new(
                        trace.events().iter().map(|e| back.get(e.as_str()).copied().unwrap_or(e)),
                    ));
                }
            }
        }
        report.verdict = match report.protocol {
            ProtocolVerdict::Fails => Verdict::AdaptCandidate,
            _ => Verdict::Use,
        };
        report.score = score(kind_weight(mm.overall_kind), names, report.protocol);
        return Ok(report);
    }

    let partial = match_partial(&req.iface, &entry.provided, lattice);
    let matched = partial.method_map.len();
    let same = partial.method_map.values().filter(|m| m.query_method == m.provided_method).count();
    report.kind = partial.method_map.values().map(|m| m.kind).min();
    report.contradictory = partial
        .unmatched
        .iter()
        .filter(|q| {
            let (Some(qs), Some(ps)) = (req.iface.method(q), entry.provided.method(q)) else {
                return false;
            };
            match_method(qs, ps, lattice).is_none()
        })
        .cloned()
        .collect();
    report.unmatched = partial.unmatched;
    report.method_map = partial.method_map;
    if matched * 2 >= n && report.contradictory.is_empty() {
        report.verdict = Verdict::AdaptCandidate;
    }
    // Kind weight scaled by coverage: a partial match never outranks the
    // same kind matched in full.
    let kind = report.kind.map_or(Ratio::from_integer(0), kind_weight) * fraction(matched, n);
    report.score = score(kind, fraction(same, n), ProtocolVerdict::NotChecked);
    Ok(report)
}

/// Runs the pipeline against every prefiltered index entry and ranks the
/// reports by verdict, then descending score, then component name.
pub fn match_requirement(
    req: &Requirement,
    index: &CompiledIndex,
    options: MatchOptions,
) -> Result<QueryResult, MatchError> {
    let candidates: Vec<&IndexEntry> = if options.prefilter {
        prefilter(req, &index.entries)
    } else {
        index.entries.iter().collect()
    };
    let lattice = index.lattice();
    let mut reports = options
        .execution
        .map(&candidates, |e| match_entry(req, e, &lattice, options.state_limit))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    reports.sort_by(|a, b| {
        (a.verdict, std::cmp::Reverse(a.score), &a.component).cmp(&(b.verdict, std::cmp::Reverse(b.score), &b.component))
    });
    let recommendation = match reports.first() {
        Some(r) if r.verdict == Verdict::Use => Recommendation::Use(r.component.clone()),
        Some(r) if r.verdict == Verdict::AdaptCandidate => Recommendation::Adapt(r.component.clone()),
        _ => Recommendation::New,
    };
    Ok(QueryResult {
        requirement: req.iface.name.clone(),
        reports,
        recommendation,
    })
}

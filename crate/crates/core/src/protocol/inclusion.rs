use std::collections::{HashMap, HashSet, VecDeque};

use super::automaton::{FiniteAutomaton, StateId, Symbol, Trace};
use super::ops::determinize_bounded;
use super::{ProtocolError, DEFAULT_STATE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Inclusion {
    Holds,
    /// A shortest, then name-lexicographically least, trace accepted by the
    /// required automaton and rejected by the provided one.
    Fails(Trace),
}

impl Inclusion {
    pub fn holds(&self) -> bool {
        matches!(self, Inclusion::Holds)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    Holds,
    /// A shortest separating trace and the side that accepts it.
    Differs { trace: Trace, accepted_by: Side },
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        matches!(self, Equivalence::Holds)
    }
}

fn union_alphabet(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Vec<String> {
    let mut alphabet: Vec<String> = a.alphabet().iter().chain(b.alphabet()).cloned().collect();
    alphabet.sort();
    alphabet.dedup();
    alphabet
}

/// Breadth-first search over the pair product of two DFAs (`None` = the
/// implicit sink). Returns the lexicographically least shortest word
/// reaching a pair for which `bad` holds.
fn search(
    a: &FiniteAutomaton,
    b: &FiniteAutomaton,
    alphabet: &[String],
    limit: usize,
    skip_left_sink: bool,
    bad: impl Fn(bool, bool) -> bool,
) -> Result<Option<(Trace, bool)>, ProtocolError> {
    type Pair = (Option<StateId>, Option<StateId>);
    let accepts = |fa: &FiniteAutomaton, s: Option<StateId>| s.is_some_and(|s| fa.is_accepting(s));
    let start: Pair = (Some(a.start()), Some(b.start()));
    let mut parent: HashMap<Pair, (Pair, Symbol)> = HashMap::new();
    let mut seen: HashSet<Pair> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut found = None;
    if bad(accepts(a, start.0), accepts(b, start.1)) {
        found = Some(start);
    }
    'outer: while found.is_none() {
        let Some(pair) = queue.pop_front() else { break };
        for sym in 0..alphabet.len() as Symbol {
            let next: Pair = (pair.0.and_then(|s| a.step(s, sym)), pair.1.and_then(|s| b.step(s, sym)));
            if next.0.is_none() && (skip_left_sink || next.1.is_none()) {
                continue;
            }
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= limit {
                return Err(ProtocolError::TooLarge { limit });
            }
            seen.insert(next);
            parent.insert(next, (pair, sym));
            if bad(accepts(a, next.0), accepts(b, next.1)) {
                found = Some(next);
                break 'outer;
            }
            queue.push_back(next);
        }
    }
    let Some(end) = found else { return Ok(None) };
    let left_accepts = accepts(a, end.0);
    let mut word = Vec::new();
    let mut cur = end;
    while let Some(&(prev, sym)) = parent.get(&cur) {
        word.push(alphabet[sym as usize].clone());
        cur = prev;
    }
    word.reverse();
    Ok(Some((Trace(word), left_accepts)))
}

/// Decides `L(required) ⊆ L(provided)` over the union of both alphabets.
pub fn includes(required: &FiniteAutomaton, provided: &FiniteAutomaton) -> Result<Inclusion, ProtocolError> {
    includes_bounded(required, provided, DEFAULT_STATE_LIMIT)
}

/// [`includes`] with an explicit bound on subset and product states.
pub fn includes_bounded(
    required: &FiniteAutomaton,
    provided: &FiniteAutomaton,
    limit: usize,
) -> Result<Inclusion, ProtocolError> {
    let alphabet = union_alphabet(required, provided);
    let r = determinize_bounded(&required.widen(&alphabet), limit)?;
    let p = determinize_bounded(&provided.widen(&alphabet), limit)?;
    Ok(match search(&r, &p, &alphabet, limit, true, |ra, pa| ra && !pa)? {
        None => Inclusion::Holds,
        Some((trace, _)) => Inclusion::Fails(trace),
    })
}

/// Decides `L(a) = L(b)`.
pub fn equivalent(a: &FiniteAutomaton, b: &FiniteAutomaton) -> Result<Equivalence, ProtocolError> {
    equivalent_bounded(a, b, DEFAULT_STATE_LIMIT)
}

pub fn equivalent_bounded(
    a: &FiniteAutomaton,
    b: &FiniteAutomaton,
    limit: usize,
) -> Result<Equivalence, ProtocolError> {
    let alphabet = union_alphabet(a, b);
    let da = determinize_bounded(&a.widen(&alphabet), limit)?;
    let db = determinize_bounded(&b.widen(&alphabet), limit)?;
    Ok(match search(&da, &db, &alphabet, limit, false, |x, y| x != y)? {
        None => Equivalence::Holds,
        Some((trace, left)) => Equivalence::Differs {
            trace,
            accepted_by: if left { Side::Left } else { Side::Right },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_protocol;
    use crate::protocol::compile;

    fn fa(text: &str) -> FiniteAutomaton {
        compile(&parse_protocol(text, None).unwrap().0)
    }

    const LISTING4: &str =
        "(?searchDocument+?setPreference)*| (?searchDocument+ ?viewDocument?setPreference)*";

    #[test]
    fn listing_four_inclusion() {
        let provided = fa(LISTING4);
        assert_eq!(
            includes(&fa("?searchDocument ?viewDocument ?setPreference"), &provided).unwrap(),
            Inclusion::Holds
        );
        assert_eq!(
            includes(&fa("?viewDocument"), &provided).unwrap(),
            Inclusion::Fails(Trace::new(["viewDocument"]))
        );
        assert!(includes(&provided, &provided).unwrap().holds());
    }

    #[test]
    fn foreign_events_fail_inclusion() {
        assert_eq!(
            includes(&fa("?a ?z"), &fa("(?a + ?b)*")).unwrap(),
            Inclusion::Fails(Trace::new(["a", "z"]))
        );
    }

    #[test]
    fn counterexample_is_lexicographically_least() {
        assert_eq!(
            includes(&fa("?c + ?b + ?a ?a"), &fa("?a ?a")).unwrap(),
            Inclusion::Fails(Trace::new(["b"]))
        );
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(&fa("?a ?b + ?a ?b"), &fa("?a ?b")).unwrap().holds());
        assert_eq!(
            equivalent(&fa("?a*"), &fa("?a ?a*")).unwrap(),
            Equivalence::Differs {
                trace: Trace::default(),
                accepted_by: Side::Left
            }
        );
        assert_eq!(
            equivalent(&fa("?a ?b"), &fa("?a ?b + ?b")).unwrap(),
            Equivalence::Differs {
                trace: Trace::new(["b"]),
                accepted_by: Side::Right
            }
        );
    }

    #[test]
    fn product_limit_is_a_clean_error() {
        let big = fa("(?a + ?b + ?c)* ?a (?a + ?b + ?c) (?a + ?b + ?c) (?a + ?b + ?c)");
        assert!(matches!(
            includes_bounded(&big, &fa("?a*"), 4),
            Err(ProtocolError::TooLarge { limit: 4 })
        ));
    }
}

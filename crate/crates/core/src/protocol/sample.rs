use std::collections::VecDeque;

use super::automaton::{FiniteAutomaton, StateId, Symbol, Trace};
use super::ops::{determinize, minimize};

/// Every accepted word of length at most `max_len`, shortest first and
/// lexicographically by method name within a length.
pub fn sample_traces(a: &FiniteAutomaton, max_len: usize) -> Vec<Trace> {
    let dfa = minimize(&determinize(a)).expect("determinized");
    let dist = distance_to_accept(&dfa);
    let mut out = Vec::new();
    let mut layer: Vec<(Vec<Symbol>, StateId)> = Vec::new();
    if dist[dfa.start() as usize].is_some() {
        layer.push((Vec::new(), dfa.start()));
    }
    for len in 0..=max_len {
        for (word, s) in &layer {
            if dfa.is_accepting(*s) {
                out.push(Trace(word.iter().map(|&x| dfa.symbol_name(x).to_string()).collect()));
            }
        }
        if len == max_len {
            break;
        }
        let remaining = max_len - len - 1;
        let mut next = Vec::new();
        for (word, s) in &layer {
            for &(l, t) in dfa.transitions_from(*s) {
                if dist[t as usize].is_some_and(|d| d <= remaining) {
                    let mut w = word.clone();
                    w.push(l.expect("deterministic"));
                    next.push((w, t));
                }
            }
        }
        layer = next;
    }
    out
}

fn distance_to_accept(a: &FiniteAutomaton) -> Vec<Option<usize>> {
    let n = a.state_count();
    let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n as StateId {
        for &(_, t) in a.transitions_from(s) {
            reverse[t as usize].push(s);
        }
    }
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for s in a.accepting_states() {
        dist[s as usize] = Some(0);
        queue.push_back(s);
    }
    while let Some(s) = queue.pop_front() {
        let d = dist[s as usize].expect("set");
        for &p in &reverse[s as usize] {
            if dist[p as usize].is_none() {
                dist[p as usize] = Some(d + 1);
                queue.push_back(p);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_protocol;
    use crate::protocol::compile;

    fn fa(text: &str) -> FiniteAutomaton {
        compile(&parse_protocol(text, None).unwrap().0)
    }

    #[test]
    fn star_samples() {
        assert_eq!(
            sample_traces(&fa("?a*"), 2),
            vec![Trace::default(), Trace::new(["a"]), Trace::new(["a", "a"])]
        );
    }

    #[test]
    fn listing_four_short_traces() {
        let traces = sample_traces(
            &fa("(?searchDocument+?setPreference)*| (?searchDocument+ ?viewDocument?setPreference)*"),
            2,
        );
        assert!(traces.contains(&Trace::new(["searchDocument", "setPreference"])));
        assert!(!traces.contains(&Trace::new(["viewDocument"])));
        assert!(traces.windows(2).all(|w| (w[0].len(), &w[0]) < (w[1].len(), &w[1])));
    }

    #[test]
    fn empty_language_has_no_samples() {
        assert!(sample_traces(&FiniteAutomaton::empty(vec!["a".into()]), 5).is_empty());
    }
}

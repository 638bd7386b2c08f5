use std::collections::{BTreeSet, HashMap, VecDeque};

use super::automaton::{FiniteAutomaton, StateId, Symbol};
use super::ProtocolError;

/// Subset construction. The result has no dead state: a missing transition
/// means rejection.
pub fn determinize(a: &FiniteAutomaton) -> FiniteAutomaton {
    determinize_bounded(a, usize::MAX).expect("unbounded")
}

/// [`determinize`] that gives up once more than `limit` subsets are built.
pub fn determinize_bounded(a: &FiniteAutomaton, limit: usize) -> Result<FiniteAutomaton, ProtocolError> {
    if a.is_deterministic() {
        return Ok(a.clone());
    }
    let k = a.alphabet().len();
    let first = a.epsilon_closure([a.start()]);
    let mut ids: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets = vec![first.clone()];
    ids.insert(first, 0);
    let mut transitions: Vec<Vec<(Option<Symbol>, StateId)>> = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let mut row = Vec::new();
        // Successors for every symbol in one pass over the subset.
        let mut moves: Vec<Vec<StateId>> = vec![Vec::new(); k];
        for &s in &subsets[i] {
            for &(l, t) in a.transitions_from(s) {
                if let Some(l) = l {
                    moves[l as usize].push(t);
                }
            }
        }
        for (sym, targets) in moves.into_iter().enumerate() {
            if targets.is_empty() {
                continue;
            }
            let closure = a.epsilon_closure(targets);
            let id = match ids.get(&closure) {
                Some(&id) => id,
                None => {
                    let id = subsets.len() as StateId;
                    if subsets.len() >= limit {
                        return Err(ProtocolError::TooLarge { limit });
                    }
                    ids.insert(closure.clone(), id);
                    subsets.push(closure);
                    id
                }
            };
            row.push((Some(sym as Symbol), id));
        }
        transitions.push(row);
        i += 1;
    }
    let accepting = subsets
        .iter()
        .map(|set| set.iter().any(|&s| a.is_accepting(s)))
        .collect();
    Ok(FiniteAutomaton::assemble(a.alphabet().to_vec(), transitions, 0, accepting))
}

/// States reachable from the start that can still reach an accepting state.
fn live_states(a: &FiniteAutomaton) -> Vec<bool> {
    let n = a.state_count();
    let mut reach = vec![false; n];
    for s in a.bfs_order() {
        reach[s as usize] = true;
    }
    let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        for &(_, t) in a.transitions_from(s as StateId) {
            reverse[t as usize].push(s as StateId);
        }
    }
    let mut live = vec![false; n];
    let mut stack: Vec<StateId> = a.accepting_states().filter(|&s| reach[s as usize]).collect();
    for &s in &stack {
        live[s as usize] = true;
    }
    while let Some(s) = stack.pop() {
        for &p in &reverse[s as usize] {
            if reach[p as usize] && !live[p as usize] {
                live[p as usize] = true;
                stack.push(p);
            }
        }
    }
    live
}

/// Minimal trimmed DFA for the language of `a`, numbered in breadth-first
/// order from the start. Two minimal automata for the same language over the
/// same alphabet are therefore identical.
pub fn minimize(a: &FiniteAutomaton) -> Result<FiniteAutomaton, ProtocolError> {
    if !a.is_deterministic() {
        return Err(ProtocolError::NotDeterministic);
    }
    let live = live_states(a);
    if !live[a.start() as usize] {
        return Ok(FiniteAutomaton::empty(a.alphabet().to_vec()));
    }
    let states: Vec<StateId> = (0..a.state_count() as StateId).filter(|&s| live[s as usize]).collect();
    let k = a.alphabet().len();
    const SINK: u32 = u32::MAX;

    // Moore refinement; transitions into dead states go to an implicit sink.
    let mut class: Vec<u32> = vec![SINK; a.state_count()];
    for &s in &states {
        class[s as usize] = u32::from(a.is_accepting(s));
    }
    let mut count = states.iter().map(|&s| class[s as usize]).collect::<BTreeSet<_>>().len();
    loop {
        let mut sigs: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next = vec![SINK; a.state_count()];
        for &s in &states {
            let mut sig = Vec::with_capacity(k + 1);
            sig.push(class[s as usize]);
            for sym in 0..k as Symbol {
                sig.push(match a.step(s, sym) {
                    Some(t) if live[t as usize] => class[t as usize],
                    _ => SINK,
                });
            }
            let fresh = sigs.len() as u32;
            next[s as usize] = *sigs.entry(sig).or_insert(fresh);
        }
        let stable = sigs.len() == count;
        count = sigs.len();
        class = next;
        if stable {
            break;
        }
    }

    // Quotient, renumbered breadth-first from the start class.
    let mut number: HashMap<u32, StateId> = HashMap::new();
    let mut reps: Vec<StateId> = Vec::new();
    let start_class = class[a.start() as usize];
    number.insert(start_class, 0);
    reps.push(a.start());
    let mut queue = VecDeque::from([a.start()]);
    let mut transitions: Vec<Vec<(Option<Symbol>, StateId)>> = vec![Vec::new()];
    while let Some(s) = queue.pop_front() {
        let from = number[&class[s as usize]];
        for sym in 0..k as Symbol {
            let Some(t) = a.step(s, sym).filter(|&t| live[t as usize]) else {
                continue;
            };
            let c = class[t as usize];
            let to = match number.get(&c) {
                Some(&n) => n,
                None => {
                    let n = reps.len() as StateId;
                    number.insert(c, n);
                    reps.push(t);
                    transitions.push(Vec::new());
                    queue.push_back(t);
                    n
                }
            };
            transitions[from as usize].push((Some(sym), to));
        }
    }
    let accepting = reps.iter().map(|&s| a.is_accepting(s)).collect();
    Ok(FiniteAutomaton::assemble(a.alphabet().to_vec(), transitions, 0, accepting))
}

/// Erases every symbol outside `keep` and returns the minimal DFA of the
/// resulting language, over the alphabet `keep`.
pub fn project(a: &FiniteAutomaton, keep: &BTreeSet<String>) -> FiniteAutomaton {
    project_bounded(a, keep, usize::MAX).expect("unbounded")
}

pub fn project_bounded(
    a: &FiniteAutomaton,
    keep: &BTreeSet<String>,
    limit: usize,
) -> Result<FiniteAutomaton, ProtocolError> {
    let alphabet: Vec<String> = keep.iter().cloned().collect();
    let relabel: Vec<Option<Symbol>> = a
        .alphabet()
        .iter()
        .map(|n| alphabet.binary_search(n).ok().map(|i| i as Symbol))
        .collect();
    let transitions = (0..a.state_count() as StateId)
        .map(|s| {
            a.transitions_from(s)
                .iter()
                .map(|&(l, t)| (l.and_then(|l| relabel[l as usize]), t))
                .collect()
        })
        .collect();
    let accepting = (0..a.state_count() as StateId).map(|s| a.is_accepting(s)).collect();
    let erased = FiniteAutomaton::assemble(alphabet, transitions, a.start(), accepting);
    minimize(&determinize_bounded(&erased, limit)?)
}

/// compile, determinize and minimize in one step.
pub fn minimal_dfa(a: &FiniteAutomaton, limit: usize) -> Result<FiniteAutomaton, ProtocolError> {
    minimize(&determinize_bounded(a, limit)?)
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
    fn determinize_merges_common_prefix() {
        let d = determinize(&fa("?a ?b + ?a ?c"));
        assert!(d.is_deterministic());
        assert_eq!(d.transitions_from(d.start()).len(), 1);
        let m = minimize(&d).unwrap();
        assert_eq!(m.state_count(), 3);
        for w in [vec!["a", "b"], vec!["a", "c"]] {
            assert!(m.accepts(&w));
        }
        assert!(!m.accepts(&["a"]));
    }

    #[test]
    fn epsilon_only_accepts_empty_word() {
        let nfa = FiniteAutomaton::from_parts(vec![], 3, 0, &[2], vec![(0, None, 1), (1, None, 2)]).unwrap();
        assert!(!nfa.is_deterministic());
        let d = determinize(&nfa);
        assert!(d.is_deterministic());
        assert_eq!(d.state_count(), 1);
        assert!(d.accepts::<&str>(&[]));
    }

    #[test]
    fn deterministic_input_is_left_alone() {
        let d = minimize(&determinize(&fa("?a*"))).unwrap();
        assert_eq!(determinize(&d), d);
        assert_eq!(minimize(&d).unwrap(), d);
        assert_eq!(d.state_count(), 1);
    }

    #[test]
    fn minimize_drops_unreachable_and_dead_states() {
        let d = FiniteAutomaton::from_parts(
            vec!["a".into(), "b".into()],
            5,
            0,
            &[1, 4],
            vec![
                (0, Some("a".into()), 1),
                (0, Some("b".into()), 2),
                (2, Some("a".into()), 2),
                (3, Some("a".into()), 4),
            ],
        )
        .unwrap();
        let m = minimize(&d).unwrap();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.to_dfa_text().unwrap(), "start: 0\naccept: 1\n0 a 1\n");
    }

    #[test]
    fn minimize_rejects_nfa() {
        assert!(matches!(minimize(&fa("?a + ?a ?b")), Err(ProtocolError::NotDeterministic)));
    }

    #[test]
    fn empty_language() {
        let m = minimize(&FiniteAutomaton::empty(vec!["a".into()])).unwrap();
        assert_eq!(m.state_count(), 1);
        assert_eq!(m.accepting_states().count(), 0);
    }

    #[test]
    fn project_single_word() {
        let keep: BTreeSet<String> = ["a".to_string()].into();
        let p = project(&fa("?a ?b ?a"), &keep);
        assert!(p.accepts(&["a", "a"]));
        assert!(!p.accepts(&["a"]));
        assert!(!p.accepts(&["a", "b", "a"]));
    }

    #[test]
    fn determinize_respects_limit() {
        // (a+b)* a (a+b)^n needs 2^(n+1) subset states.
        let text = format!("(?a + ?b)* ?a{}", " (?a + ?b)".repeat(10));
        assert!(matches!(
            determinize_bounded(&fa(&text), 100),
            Err(ProtocolError::TooLarge { limit: 100 })
        ));
        assert!(determinize_bounded(&fa(&text), 10_000).is_ok());
    }
}

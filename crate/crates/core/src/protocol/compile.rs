use std::collections::HashMap;

use super::automaton::{FiniteAutomaton, StateId, Symbol};
use super::ops::{determinize, minimize};
use super::ProtocolExpr;

struct Builder<'a> {
    alphabet: &'a [String],
    transitions: Vec<Vec<(Option<Symbol>, StateId)>>,
}

impl Builder<'_> {
    fn state(&mut self) -> StateId {
        self.transitions.push(Vec::new());
        (self.transitions.len() - 1) as StateId
    }

    fn edge(&mut self, from: StateId, label: Option<Symbol>, to: StateId) {
        self.transitions[from as usize].push((label, to));
    }

    /// Thompson fragment for `e`: (entry, exit).
    fn fragment(&mut self, e: &ProtocolExpr) -> (StateId, StateId) {
        match e {
            ProtocolExpr::Eps => {
                let (s, t) = (self.state(), self.state());
                self.edge(s, None, t);
                (s, t)
            }
            ProtocolExpr::Ev(m) => {
                let sym = self.alphabet.binary_search(m).expect("event in alphabet") as Symbol;
                let (s, t) = (self.state(), self.state());
                self.edge(s, Some(sym), t);
                (s, t)
            }
            ProtocolExpr::Seq(a, b) => {
                let (a0, a1) = self.fragment(a);
                let (b0, b1) = self.fragment(b);
                self.edge(a1, None, b0);
                (a0, b1)
            }
            ProtocolExpr::Alt(a, b) => {
                let s = self.state();
                let (a0, a1) = self.fragment(a);
                let (b0, b1) = self.fragment(b);
                let t = self.state();
                self.edge(s, None, a0);
                self.edge(s, None, b0);
                self.edge(a1, None, t);
                self.edge(b1, None, t);
                (s, t)
            }
            ProtocolExpr::Star(a) => {
                let s = self.state();
                let (a0, a1) = self.fragment(a);
                let t = self.state();
                self.edge(s, None, a0);
                self.edge(s, None, t);
                self.edge(a1, None, a0);
                self.edge(a1, None, t);
                (s, t)
            }
            ProtocolExpr::Shuffle(a, b) => {
                // Interleaving product of the operands' minimal DFAs.
                let left = minimal(a, self.alphabet);
                let right = minimal(b, self.alphabet);
                let exit = self.state();
                let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
                let mut work = Vec::new();
                let origin = (left.start(), right.start());
                let entry = self.state();
                ids.insert(origin, entry);
                work.push(origin);
                while let Some((p, q)) = work.pop() {
                    let id = ids[&(p, q)];
                    if left.is_accepting(p) && right.is_accepting(q) {
                        self.edge(id, None, exit);
                    }
                    let moves = left
                        .transitions_from(p)
                        .iter()
                        .map(|&(l, p2)| (l, (p2, q)))
                        .chain(right.transitions_from(q).iter().map(|&(l, q2)| (l, (p, q2))));
                    for (label, pair) in moves.collect::<Vec<_>>() {
                        let target = match ids.get(&pair) {
                            Some(&t) => t,
                            None => {
                                let t = self.state();
                                ids.insert(pair, t);
                                work.push(pair);
                                t
                            }
                        };
                        self.edge(id, label, target);
                    }
                }
                (entry, exit)
            }
        }
    }
}

fn minimal(e: &ProtocolExpr, alphabet: &[String]) -> FiniteAutomaton {
    let nfa = build(e, alphabet);
    minimize(&determinize(&nfa)).expect("determinized input")
}

fn build(e: &ProtocolExpr, alphabet: &[String]) -> FiniteAutomaton {
    let mut b = Builder {
        alphabet,
        transitions: Vec::new(),
    };
    let (start, exit) = b.fragment(e);
    let mut accepting = vec![false; b.transitions.len()];
    accepting[exit as usize] = true;
    FiniteAutomaton::assemble(alphabet.to_vec(), b.transitions, start, accepting)
}

/// Compiles a protocol expression to an epsilon automaton whose alphabet is
/// the set of events the expression mentions.
pub fn compile(expr: &ProtocolExpr) -> FiniteAutomaton {
    compile_over(expr, std::iter::empty::<&str>())
}

/// Like [`compile`], with `extra` symbols added to the alphabet.
pub fn compile_over<'a>(expr: &ProtocolExpr, extra: impl IntoIterator<Item = &'a str>) -> FiniteAutomaton {
    let mut alphabet = expr.events();
    alphabet.extend(extra.into_iter().map(str::to_string));
    let alphabet: Vec<String> = alphabet.into_iter().collect();
    build(expr, &alphabet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_protocol;

    fn fa(text: &str) -> FiniteAutomaton {
        compile(&parse_protocol(text, None).unwrap().0)
    }

    #[test]
    fn single_event() {
        let a = fa("?a");
        assert_eq!(a.state_count(), 2);
        assert!(a.accepts(&["a"]));
        assert!(!a.accepts::<&str>(&[]));
        assert!(!a.accepts(&["a", "a"]));
    }

    #[test]
    fn two_word_shuffle() {
        let a = fa("?a | ?b");
        assert!(a.accepts(&["a", "b"]));
        assert!(a.accepts(&["b", "a"]));
        assert!(!a.accepts(&["a"]));
        assert!(!a.accepts(&["a", "a"]));
        assert!(!a.accepts(&["b", "a", "b"]));
    }

    #[test]
    fn listing_four_words() {
        let a = fa("(?searchDocument+?setPreference)*| (?searchDocument+ ?viewDocument?setPreference)*");
        assert!(a.accepts(&["searchDocument", "setPreference"]));
        assert!(a.accepts(&["searchDocument", "viewDocument", "setPreference"]));
        assert!(a.accepts::<&str>(&[]));
        assert!(!a.accepts(&["viewDocument"]));
    }

    #[test]
    fn extra_alphabet_symbols_are_kept() {
        let a = compile_over(&ProtocolExpr::ev("b"), ["a", "c"]);
        assert_eq!(a.alphabet(), ["a", "b", "c"]);
        assert!(a.accepts(&["b"]));
    }
}

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::ProtocolError;

pub type StateId = u32;
/// Index into an automaton's alphabet.
pub type Symbol = u32;

/// A finite automaton over method-name events, possibly with epsilon moves.
///
/// The alphabet is kept sorted, so symbol order is method-name order. Per
/// state, transitions are sorted by `(label, target)` with epsilon first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAutomaton {
    pub(crate) alphabet: Vec<String>,
    pub(crate) transitions: Vec<Vec<(Option<Symbol>, StateId)>>,
    pub(crate) start: StateId,
    pub(crate) accepting: Vec<bool>,
    pub(crate) deterministic: bool,
}

impl FiniteAutomaton {
    /// Builds an automaton from raw parts, checking the structural
    /// invariants. `alphabet` is sorted and deduplicated; transition labels
    /// refer to positions in the *sorted* alphabet.
    pub fn from_parts(
        alphabet: Vec<String>,
        state_count: usize,
        start: StateId,
        accepting: &[StateId],
        transitions: Vec<(StateId, Option<String>, StateId)>,
    ) -> Result<Self, ProtocolError> {
        let alphabet: Vec<String> = alphabet.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let bad = |m: String| ProtocolError::Malformed(m);
        if state_count == 0 {
            return Err(bad("automaton has no states".into()));
        }
        if start as usize >= state_count {
            return Err(bad(format!("start state {start} out of range")));
        }
        let mut acc = vec![false; state_count];
        for &s in accepting {
            *acc.get_mut(s as usize)
                .ok_or_else(|| bad(format!("accepting state {s} out of range")))? = true;
        }
        let mut table = vec![Vec::new(); state_count];
        for (from, label, to) in transitions {
            if from as usize >= state_count || to as usize >= state_count {
                return Err(bad(format!("transition {from} -> {to} out of range")));
            }
            let sym = match label {
                None => None,
                Some(name) => Some(
                    alphabet
                        .binary_search(&name)
                        .map_err(|_| bad(format!("symbol `{name}` not in alphabet")))?
                        as Symbol,
                ),
            };
            table[from as usize].push((sym, to));
        }
        Ok(Self::assemble(alphabet, table, start, acc))
    }

    pub(crate) fn assemble(
        alphabet: Vec<String>,
        mut transitions: Vec<Vec<(Option<Symbol>, StateId)>>,
        start: StateId,
        accepting: Vec<bool>,
    ) -> Self {
        for row in &mut transitions {
            row.sort_unstable();
            row.dedup();
        }
        let deterministic = transitions.iter().all(|row| {
            row.iter().all(|(l, _)| l.is_some()) && row.windows(2).all(|w| w[0].0 != w[1].0)
        });
        FiniteAutomaton {
            alphabet,
            transitions,
            start,
            accepting,
            deterministic,
        }
    }

    /// The automaton accepting nothing.
    pub fn empty(alphabet: Vec<String>) -> Self {
        Self::assemble(alphabet, vec![Vec::new()], 0, vec![false])
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s as usize]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.accepting
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| i as StateId)
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    pub fn transitions_from(&self, s: StateId) -> &[(Option<Symbol>, StateId)] {
        &self.transitions[s as usize]
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().map(Vec::len).sum()
    }

    pub fn symbol_name(&self, sym: Symbol) -> &str {
        &self.alphabet[sym as usize]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.alphabet.binary_search_by(|a| a.as_str().cmp(name)).ok().map(|i| i as Symbol)
    }

    /// Deterministic successor, if any.
    pub(crate) fn step(&self, s: StateId, sym: Symbol) -> Option<StateId> {
        let row = &self.transitions[s as usize];
        let i = row.partition_point(|&(l, _)| l < Some(sym));
        match row.get(i) {
            Some(&(Some(l), t)) if l == sym => Some(t),
            _ => None,
        }
    }

    pub(crate) fn epsilon_closure(&self, seeds: impl IntoIterator<Item = StateId>) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut stack: Vec<StateId> = Vec::new();
        for s in seeds {
            if !seen[s as usize] {
                seen[s as usize] = true;
                stack.push(s);
            }
        }
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            out.push(s);
            for &(l, t) in &self.transitions[s as usize] {
                if l.is_some() {
                    break;
                }
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    stack.push(t);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether the automaton accepts the word. Works with or without
    /// epsilon moves; unknown method names are rejected.
    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> bool {
        let mut current = self.epsilon_closure([self.start]);
        for name in word {
            let Some(sym) = self.symbol(name.as_ref()) else {
                return false;
            };
            let next: Vec<StateId> = current
                .iter()
                .flat_map(|&s| {
                    self.transitions[s as usize]
                        .iter()
                        .filter(move |(l, _)| *l == Some(sym))
                        .map(|&(_, t)| t)
                })
                .collect();
            current = self.epsilon_closure(next);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&s| self.accepting[s as usize])
    }

    /// The same automaton with its alphabet widened to `alphabet`, which must
    /// be a sorted superset of the current one.
    pub(crate) fn widen(&self, alphabet: &[String]) -> FiniteAutomaton {
        if alphabet == self.alphabet.as_slice() {
            return self.clone();
        }
        let map: Vec<Symbol> = self
            .alphabet
            .iter()
            .map(|n| alphabet.binary_search(n).expect("superset alphabet") as Symbol)
            .collect();
        let transitions = self
            .transitions
            .iter()
            .map(|row| row.iter().map(|&(l, t)| (l.map(|s| map[s as usize]), t)).collect())
            .collect();
        Self::assemble(alphabet.to_vec(), transitions, self.start, self.accepting.clone())
    }

    /// Textual DFA listing: `start:` and `accept:` header lines followed by
    /// one `state symbol state` line per transition. States are renumbered
    /// from 0 in breadth-first order from the start state, exploring
    /// symbols in name order; unreachable states are omitted.
    pub fn to_dfa_text(&self) -> Result<String, ProtocolError> {
        if !self.deterministic {
            return Err(ProtocolError::NotDeterministic);
        }
        let order = self.bfs_order();
        let mut number = vec![u32::MAX; self.state_count()];
        for (i, &s) in order.iter().enumerate() {
            number[s as usize] = i as u32;
        }
        let mut out = String::from("start: 0\naccept:");
        for &s in &order {
            if self.accepting[s as usize] {
                out.push_str(&format!(" {}", number[s as usize]));
            }
        }
        out.push('\n');
        for &s in &order {
            for &(l, t) in &self.transitions[s as usize] {
                let l = l.expect("deterministic");
                out.push_str(&format!(
                    "{} {} {}\n",
                    number[s as usize],
                    self.alphabet[l as usize],
                    number[t as usize]
                ));
            }
        }
        Ok(out)
    }

    /// Parses the listing written by [`to_dfa_text`](Self::to_dfa_text).
    /// The alphabet is `alphabet` when given, otherwise the symbols that
    /// appear on transitions.
    pub fn from_dfa_text(text: &str, alphabet: Option<Vec<String>>) -> Result<Self, ProtocolError> {
        let err = |line: usize, m: &str| ProtocolError::Format {
            line,
            message: m.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (n, first) = lines.next().ok_or_else(|| err(1, "missing `start:` line"))?;
        let start: StateId = first
            .strip_prefix("start: ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(n, "expected `start: <state>`"))?;
        let (n, second) = lines.next().ok_or_else(|| err(2, "missing `accept:` line"))?;
        let rest = second
            .strip_prefix("accept:")
            .ok_or_else(|| err(n, "expected `accept: <states>`"))?;
        let accepting = rest
            .split_whitespace()
            .map(|s| s.parse::<StateId>().map_err(|_| err(n, "bad accepting state")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut transitions = Vec::new();
        let mut max_state = start;
        let mut symbols = BTreeSet::new();
        for (n, line) in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [from, sym, to] = parts.as_slice() else {
                return Err(err(n, "expected `<state> <symbol> <state>`"));
            };
            let from: StateId = from.parse().map_err(|_| err(n, "bad source state"))?;
            let to: StateId = to.parse().map_err(|_| err(n, "bad target state"))?;
            max_state = max_state.max(from).max(to);
            symbols.insert(sym.to_string());
            transitions.push((from, Some(sym.to_string()), to));
        }
        for &a in &accepting {
            max_state = max_state.max(a);
        }
        if max_state >= 10_000_000 {
            return Err(err(0, "state numbers out of range"));
        }
        let alphabet = alphabet.unwrap_or_else(|| symbols.into_iter().collect());
        let fa = Self::from_parts(alphabet, max_state as usize + 1, start, &accepting, transitions)?;
        if !fa.deterministic {
            return Err(ProtocolError::NotDeterministic);
        }
        Ok(fa)
    }

    pub(crate) fn bfs_order(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.start];
        seen[self.start as usize] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(s) = queue.pop_front() {
            for &(_, t) in &self.transitions[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
        order
    }
}

/// A sequence of method-call events.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Trace(pub Vec<String>);

impl Trace {
    pub fn new<S: Into<String>>(items: impl IntoIterator<Item = S>) -> Self {
        Trace(items.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn events(&self) -> &[String] {
        &self.0
    }

    /// Renders as a call sequence, e.g. `?search ?view`.
    pub fn as_calls(&self) -> String {
        if self.0.is_empty() {
            return "(empty trace)".into();
        }
        self.0.iter().map(|m| format!("?{m}")).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

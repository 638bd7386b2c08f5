//! Independent membership oracle: Brzozowski derivatives over hash-consed
//! terms, with alternatives kept as sets (associativity, commutativity and
//! idempotence), so the derivative closure of any expression is finite.

use std::collections::{BTreeSet, HashMap, VecDeque};

use archmatch::protocol::{FiniteAutomaton, ProtocolExpr, StateId};

pub type Term = usize;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Node {
    Empty,
    Eps,
    Sym(String),
    Seq(Term, Term),
    Alt(BTreeSet<Term>),
    Star(Term),
    Shuffle(Term, Term),
}

pub struct Oracle {
    nodes: Vec<Node>,
    ids: HashMap<Node, Term>,
    nullable: Vec<bool>,
    derivs: HashMap<(Term, String), Term>,
}

const EMPTY: Term = 0;
const EPS: Term = 1;

impl Default for Oracle {
    fn default() -> Self {
        Self::new()
    }
}

impl Oracle {
    pub fn new() -> Self {
        let mut o = Oracle {
            nodes: Vec::new(),
            ids: HashMap::new(),
            nullable: Vec::new(),
            derivs: HashMap::new(),
        };
        o.intern(Node::Empty);
        o.intern(Node::Eps);
        o
    }

    fn intern(&mut self, node: Node) -> Term {
        if let Some(&id) = self.ids.get(&node) {
            return id;
        }
        let nullable = match &node {
            Node::Empty | Node::Sym(_) => false,
            Node::Eps | Node::Star(_) => true,
            Node::Seq(a, b) | Node::Shuffle(a, b) => self.nullable[*a] && self.nullable[*b],
            Node::Alt(items) => items.iter().any(|&t| self.nullable[t]),
        };
        let id = self.nodes.len();
        self.nodes.push(node.clone());
        self.nullable.push(nullable);
        self.ids.insert(node, id);
        id
    }

    fn seq(&mut self, a: Term, b: Term) -> Term {
        match (a, b) {
            (EMPTY, _) | (_, EMPTY) => EMPTY,
            (EPS, x) | (x, EPS) => x,
            _ => self.intern(Node::Seq(a, b)),
        }
    }

    fn alt(&mut self, items: impl IntoIterator<Item = Term>) -> Term {
        let mut set = BTreeSet::new();
        for t in items {
            match &self.nodes[t] {
                Node::Empty => {}
                Node::Alt(inner) => set.extend(inner.iter().copied()),
                _ => {
                    set.insert(t);
                }
            }
        }
        match set.len() {
            0 => EMPTY,
            1 => *set.iter().next().unwrap(),
            _ => self.intern(Node::Alt(set)),
        }
    }

    fn star(&mut self, a: Term) -> Term {
        match &self.nodes[a] {
            Node::Empty | Node::Eps => EPS,
            Node::Star(_) => a,
            _ => self.intern(Node::Star(a)),
        }
    }

    fn shuffle(&mut self, a: Term, b: Term) -> Term {
        match (a, b) {
            (EMPTY, _) | (_, EMPTY) => EMPTY,
            (EPS, x) | (x, EPS) => x,
            _ => self.intern(Node::Shuffle(a.min(b), a.max(b))),
        }
    }

    pub fn term(&mut self, e: &ProtocolExpr) -> Term {
        match e {
            ProtocolExpr::Eps => EPS,
            ProtocolExpr::Ev(m) => self.intern(Node::Sym(m.clone())),
            ProtocolExpr::Seq(a, b) => {
                let (a, b) = (self.term(a), self.term(b));
                self.seq(a, b)
            }
            ProtocolExpr::Alt(a, b) => {
                let (a, b) = (self.term(a), self.term(b));
                self.alt([a, b])
            }
            ProtocolExpr::Star(a) => {
                let a = self.term(a);
                self.star(a)
            }
            ProtocolExpr::Shuffle(a, b) => {
                let (a, b) = (self.term(a), self.term(b));
                self.shuffle(a, b)
            }
        }
    }

    pub fn is_nullable(&self, t: Term) -> bool {
        self.nullable[t]
    }

    pub fn is_empty(&self, t: Term) -> bool {
        t == EMPTY
    }

    pub fn derive(&mut self, t: Term, sym: &str) -> Term {
        if let Some(&d) = self.derivs.get(&(t, sym.to_string())) {
            return d;
        }
        let d = match self.nodes[t].clone() {
            Node::Empty | Node::Eps => EMPTY,
            Node::Sym(s) => {
                if s == sym {
                    EPS
                } else {
                    EMPTY
                }
            }
            Node::Seq(a, b) => {
                let da = self.derive(a, sym);
                let left = self.seq(da, b);
                if self.nullable[a] {
                    let db = self.derive(b, sym);
                    self.alt([left, db])
                } else {
                    left
                }
            }
            Node::Alt(items) => {
                let ds: Vec<Term> = items.iter().map(|&i| self.derive(i, sym)).collect();
                self.alt(ds)
            }
            Node::Star(a) => {
                let da = self.derive(a, sym);
                self.seq(da, t)
            }
            Node::Shuffle(a, b) => {
                let da = self.derive(a, sym);
                let db = self.derive(b, sym);
                let l = self.shuffle(da, b);
                let r = self.shuffle(a, db);
                self.alt([l, r])
            }
        };
        self.derivs.insert((t, sym.to_string()), d);
        d
    }

    /// Whether the expression denotes a language containing `word`.
    pub fn accepts<S: AsRef<str>>(&mut self, e: &ProtocolExpr, word: &[S]) -> bool {
        let mut t = self.term(e);
        for s in word {
            t = self.derive(t, s.as_ref());
        }
        self.nullable[t]
    }
}

/// Deterministic step through a DFA; `None` is the implicit dead state.
pub fn step(dfa: &FiniteAutomaton, s: StateId, sym: &str) -> Option<StateId> {
    let label = dfa.symbol(sym)?;
    dfa.transitions_from(s)
        .iter()
        .find(|(l, _)| *l == Some(label))
        .map(|&(_, t)| t)
}

/// States from which an accepting state is reachable.
pub fn live_states(dfa: &FiniteAutomaton) -> Vec<bool> {
    let n = dfa.state_count();
    let mut rev = vec![Vec::new(); n];
    for s in 0..n as StateId {
        for &(_, t) in dfa.transitions_from(s) {
            rev[t as usize].push(s);
        }
    }
    let mut live = vec![false; n];
    let mut queue: VecDeque<StateId> = dfa.accepting_states().collect();
    for &s in &queue {
        live[s as usize] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &p in &rev[s as usize] {
            if !live[p as usize] {
                live[p as usize] = true;
                queue.push_back(p);
            }
        }
    }
    live
}

/// Checks DFA membership against the oracle on every word over `alphabet`
/// up to `max_len`. A subtree whose oracle term is empty is only checked
/// for the DFA being dead there too. Returns the first disagreeing word.
pub fn first_disagreement(
    oracle: &mut Oracle,
    expr: &ProtocolExpr,
    dfa: &FiniteAutomaton,
    alphabet: &[String],
    max_len: usize,
) -> Option<Vec<String>> {
    let live = live_states(dfa);
    let root = oracle.term(expr);
    let mut stack: Vec<(Vec<String>, Term, Option<StateId>)> = vec![(Vec::new(), root, Some(dfa.start()))];
    while let Some((word, t, s)) = stack.pop() {
        let dfa_accepts = s.is_some_and(|s| dfa.is_accepting(s));
        if dfa_accepts != oracle.is_nullable(t) {
            return Some(word);
        }
        if oracle.is_empty(t) {
            if s.is_some_and(|s| live[s as usize]) {
                return Some(word);
            }
            continue;
        }
        if word.len() == max_len {
            continue;
        }
        for a in alphabet {
            let t2 = oracle.derive(t, a);
            let s2 = s.and_then(|s| step(dfa, s, a));
            let mut w = word.clone();
            w.push(a.clone());
            stack.push((w, t2, s2));
        }
    }
    None
}

/// All words over `alphabet` of exactly `len` symbols, lexicographic.
pub fn words(alphabet: &[String], len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w: Vec<String>| {
                alphabet.iter().map(move |a| {
                    let mut w = w.clone();
                    w.push(a.clone());
                    w
                })
            })
            .collect();
    }
    out
}

//! Behavior protocols as finite automata.
//!
//! Expressions compile to epsilon automata (Thompson construction, with the
//! interleaving operator built as a product of the operands' minimal DFAs).
//! Inclusion and equivalence run a breadth-first search over the product of
//! determinized operands, so the counterexamples they return are shortest
//! and, among equally short traces, least by method name.

mod automaton;
mod compile;
mod expr;
mod inclusion;
mod ops;
mod sample;

pub use automaton::{FiniteAutomaton, StateId, Symbol, Trace};
pub use compile::{compile, compile_over};
pub use expr::ProtocolExpr;
pub use inclusion::{equivalent, equivalent_bounded, includes, includes_bounded, Equivalence, Inclusion, Side};
pub use ops::{determinize, determinize_bounded, minimal_dfa, minimize, project, project_bounded};
pub use sample::sample_traces;

/// Product and subset states explored before giving up.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("protocol too large: more than {limit} automaton states")]
    TooLarge { limit: usize },
    #[error("automaton is not deterministic")]
    NotDeterministic,
    #[error("malformed automaton: {0}")]
    Malformed(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

//! The architecture description language: lexing, parsing and canonical
//! printing.
//!
//! A unit is a sequence of declarations (`type`, `interface`, `contract`,
//! `component`, `publication`, `architecture`, `link`). Protocol expressions
//! use `?m` events, juxtaposition or `;` for sequence, `+` for choice,
//! postfix `*` for repetition and `|` for interleaving, in order of
//! decreasing binding strength `*`, `;`, `+`, `|`. All binary operators
//! associate to the right.

pub mod ast;
mod diag;
mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use diag::{has_errors, Diagnostic, Severity, Span};
pub use lexer::{quote, tokenize, Keyword, Token, TokenKind};
pub use parser::parse_protocol;
pub use printer::format;

/// One ADL source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub path: String,
    pub text: String,
}

impl SourceUnit {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceUnit {
            path: path.into(),
            text: text.into(),
        }
    }
}

/// Parses a unit. Diagnostics carry the unit's path.
pub fn parse_unit(unit: &SourceUnit) -> Result<SyntaxTree, Vec<Diagnostic>> {
    parser::parse_text(&unit.text)
        .map_err(|ds| ds.into_iter().map(|d| d.with_path(unit.path.clone())).collect())
}

use std::collections::BTreeSet;

use super::{publications, Catalog, Options};
use crate::model::{Interface, Model, Publication, TypeDecl};
use crate::protocol::{compile_over, minimal_dfa, FiniteAutomaton, ProtocolError, ProtocolExpr};
use crate::sigmatch::TypeLattice;

/// Lowercase word tokens of an identifier: `searchDocuments` gives
/// `search`, `documents`; `HTTPServer` gives `http`, `server`.
pub fn split_words(ident: &str) -> Vec<String> {
    let chars: Vec<char> = ident.chars().collect();
    let mut words = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                words.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if c.is_uppercase() && !cur.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                words.push(std::mem::take(&mut cur));
            }
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        words.push(cur);
    }
    words
}

/// Compiled view of one published component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub component: String,
    /// Provided methods only; fields and inheritance are dropped.
    pub provided: Interface,
    /// Words of the component, provided interface and method names.
    pub keywords: BTreeSet<String>,
    /// Minimal DFA over the provided method names.
    pub provided_dfa: FiniteAutomaton,
    pub required_dfa: Option<FiniteAutomaton>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledIndex {
    /// Content hash of the units the index was built from.
    pub hash: String,
    pub types: Vec<TypeDecl>,
    /// Sorted by component name.
    pub entries: Vec<IndexEntry>,
}

impl CompiledIndex {
    pub fn lattice(&self) -> TypeLattice {
        TypeLattice::new(&self.types)
    }

    pub fn entry(&self, component: &str) -> Option<&IndexEntry> {
        self.entries
            .binary_search_by(|e| e.component.as_str().cmp(component))
            .ok()
            .map(|i| &self.entries[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("component `{component}`: {source}")]
    Protocol {
        component: String,
        #[source]
        source: ProtocolError,
    },
}

fn dfa_over(expr: &ProtocolExpr, iface: &Interface, limit: usize) -> Result<FiniteAutomaton, ProtocolError> {
    minimal_dfa(&compile_over(expr, iface.methods.iter().map(|m| m.name.as_str())), limit)
}

fn entry(p: &Publication, limit: usize) -> Result<IndexEntry, IndexError> {
    let wrap = |source| IndexError::Protocol {
        component: p.name.clone(),
        source,
    };
    let iface = &p.provided.iface;
    let keywords = std::iter::once(p.name.as_str())
        .chain(std::iter::once(iface.name.as_str()))
        .chain(iface.methods.iter().map(|m| m.name.as_str()))
        .flat_map(split_words)
        .collect();
    Ok(IndexEntry {
        component: p.name.clone(),
        provided: Interface {
            name: iface.name.clone(),
            fields: Vec::new(),
            methods: iface.methods.clone(),
            extends: None,
        },
        keywords,
        provided_dfa: dfa_over(&p.provided.traces, iface, limit).map_err(wrap)?,
        required_dfa: match &p.required {
            Some(r) => Some(dfa_over(&r.traces, &r.iface, limit).map_err(wrap)?),
            None => None,
        },
    })
}

/// Compiles every published component. Entries do not depend on the order
/// in which components are compiled.
pub fn build_index(catalog: &Catalog, model: &Model, options: Options) -> Result<CompiledIndex, IndexError> {
    let pubs = publications(model);
    let entries = options
        .execution
        .map(&pubs, |p| entry(p, options.state_limit))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompiledIndex {
        hash: catalog.content_hash(),
        types: model.types.values().cloned().collect(),
        entries,
    })
}

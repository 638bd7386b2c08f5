//! The component repository: a catalog of ADL units, the architectures and
//! links declared in them, and a compiled index of every component's
//! protocols and signatures that can be cached on disk.

mod cache;
mod index;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::category::{build, build_link, close, FunctorMapping, PseudoCategory};
use crate::dsl::{parse_unit, Diagnostic, SourceUnit, Span};
use crate::exec::Execution;
use crate::model::{publish_or_universal, resolve_units, validate_publication_bounded, Model, Publication,
    PublicationSide, PublicationVerdict};
use crate::protocol::DEFAULT_STATE_LIMIT;

pub use cache::{load_cache, open_index, save_cache, CacheError, CacheStatus, CACHE_MAGIC};
pub use index::{build_index, split_words, CompiledIndex, IndexEntry, IndexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Automaton state limit for every protocol operation.
    pub state_limit: usize,
    pub execution: Execution,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            state_limit: DEFAULT_STATE_LIMIT,
            execution: Execution::default(),
        }
    }
}

/// Loaded units plus the closed architectures and links built from them.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub path: PathBuf,
    /// In catalog order; paths as written in the catalog.
    pub units: Vec<SourceUnit>,
    pub architectures: BTreeMap<String, PseudoCategory>,
    pub links: BTreeMap<String, FunctorMapping>,
}

impl Catalog {
    /// SHA-256 over the units sorted by path, so listing order does not
    /// matter.
    pub fn content_hash(&self) -> String {
        let mut units: Vec<&SourceUnit> = self.units.iter().collect();
        units.sort_by(|a, b| a.path.cmp(&b.path));
        let mut h = Sha256::new();
        for u in units {
            for part in [u.path.as_bytes(), u.text.as_bytes()] {
                h.update((part.len() as u64).to_le_bytes());
                h.update(part);
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `<catalog>.idx` beside the catalog file.
    pub fn default_cache_path(&self) -> PathBuf {
        let mut name = self.path.file_name().unwrap_or_default().to_os_string();
        name.push(".idx");
        self.path.with_file_name(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{}", render(.0))]
    Invalid(Vec<Diagnostic>),
}

fn render(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

impl LoadError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            LoadError::Invalid(d) => d,
            LoadError::Io { .. } => &[],
        }
    }
}

fn io_error(path: &Path, e: impl fmt::Display) -> LoadError {
    LoadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Unit paths listed in a catalog file: one per line, `#` starts a comment.
pub fn read_catalog(path: &Path) -> Result<Vec<String>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

/// Reads a catalog file and every unit it lists (relative to the catalog's
/// directory), then loads them as [`load_units`] does.
pub fn load(path: &Path, options: Options) -> Result<(Catalog, Model), LoadError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut units = Vec::new();
    for rel in read_catalog(path)? {
        let full = dir.join(&rel);
        let text = std::fs::read_to_string(&full).map_err(|e| io_error(&full, e))?;
        units.push(SourceUnit::new(rel, text));
    }
    load_units(path.to_path_buf(), units, options)
}

/// Parses and resolves the units, builds and closes every architecture,
/// builds every link and validates every publication. All failing units
/// are reported together.
pub fn load_units(path: PathBuf, units: Vec<SourceUnit>, options: Options) -> Result<(Catalog, Model), LoadError> {
    let mut diags = Vec::new();
    let mut trees = Vec::new();
    for unit in &units {
        match parse_unit(unit) {
            Ok(tree) => trees.push((unit.path.as_str(), tree)),
            Err(ds) => diags.extend(ds),
        }
    }
    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    let model = resolve_units(trees.iter().map(|(p, t)| (*p, t)), &[]).map_err(LoadError::Invalid)?;

    let mut architectures = BTreeMap::new();
    for arch in model.architectures.values() {
        match build(arch, &model) {
            Ok(cat) => {
                architectures.insert(arch.name.name.clone(), close(&cat));
            }
            Err(ds) => diags.extend(ds),
        }
    }
    let mut links = BTreeMap::new();
    if diags.is_empty() {
        for link in model.links.values() {
            match build_link(link, &architectures) {
                Ok(f) => {
                    links.insert(link.name.name.clone(), f);
                }
                Err(ds) => diags.extend(ds),
            }
        }
    }
    let publications = publications(&model);
    let verdicts = options.execution.map(&publications, |p| {
        (p.name.clone(), validate_publication_bounded(p, options.state_limit))
    });
    for (name, verdict) in verdicts {
        let message = match verdict {
            Ok(PublicationVerdict::Pass) => continue,
            Ok(PublicationVerdict::Fail {
                side,
                witness,
                in_causal,
            }) => {
                let side = match side {
                    PublicationSide::Provided => "provided",
                    PublicationSide::Required => "required",
                };
                let origin = if in_causal { "causal relation" } else { "protocol" };
                format!(
                    "publication `{name}`: causal relation projected onto {side} methods differs from the {side} protocol; witness {} (only in the {origin})",
                    witness.as_calls()
                )
            }
            Err(e) => format!("publication `{name}`: {e}"),
        };
        diags.push(Diagnostic::error("publication", Span::default(), message));
    }
    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    Ok((
        Catalog {
            path,
            units,
            architectures,
            links,
        },
        model,
    ))
}

/// Every publication the repository offers, by name: explicit publications,
/// then components published on the fly (an explicit publication wins).
pub fn publications(model: &Model) -> Vec<Publication> {
    let mut out: BTreeMap<&str, Publication> =
        model.publications.iter().map(|(n, p)| (n.as_str(), p.clone())).collect();
    for (name, c) in &model.components {
        out.entry(name).or_insert_with(|| publish_or_universal(c));
    }
    out.into_values().collect()
}

#[cfg(test)]
mod tests;

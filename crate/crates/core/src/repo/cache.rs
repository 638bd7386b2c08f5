//! Text cache of a compiled index.
//!
//! ```text
//! ARCHMATCH-IDX v1
//! hash: <hex>
//! types: <n>
//! <name> [<: <supertype>]            (n lines)
//! components: <n>
//! component <name>
//! interface <name> <method count>
//! <method signature>                 (one per line)
//! keywords: <word> ...
//! provided: <line count>
//! alphabet: <symbol> ...
//! <DFA listing>
//! required: none | <line count>      (then alphabet and listing as above)
//! end: <component count>
//! ```

use std::fs;
use std::path::Path;

use super::{build_index, Catalog, CompiledIndex, IndexEntry, IndexError, Options};
use crate::model::{Interface, MethodSig, Model, Param, TypeDecl};
use crate::protocol::FiniteAutomaton;

pub const CACHE_MAGIC: &str = "ARCHMATCH-IDX v1";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CacheError {
    #[error("{0}")]
    Io(String),
    #[error("not an index cache or unsupported version (expected `{CACHE_MAGIC}`)")]
    Version,
    #[error("cache is truncated")]
    Truncated,
    #[error("cache is corrupt at line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("cache is stale: built from {found}, units hash to {expected}")]
    Stale { expected: String, found: String },
}

fn write_dfa(out: &mut String, label: &str, dfa: &FiniteAutomaton) {
    let text = dfa.to_dfa_text().expect("index automata are deterministic");
    out.push_str(&format!("{label}: {}\n", text.lines().count() + 1));
    out.push_str("alphabet:");
    for s in dfa.alphabet() {
        out.push(' ');
        out.push_str(s);
    }
    out.push('\n');
    out.push_str(&text);
}

fn render(index: &CompiledIndex) -> String {
    let mut out = format!("{CACHE_MAGIC}\nhash: {}\ntypes: {}\n", index.hash, index.types.len());
    for t in &index.types {
        match &t.supertype {
            Some(s) => out.push_str(&format!("{} <: {s}\n", t.name)),
            None => out.push_str(&format!("{}\n", t.name)),
        }
    }
    out.push_str(&format!("components: {}\n", index.entries.len()));
    for e in &index.entries {
        out.push_str(&format!("component {}\n", e.component));
        out.push_str(&format!("interface {} {}\n", e.provided.name, e.provided.methods.len()));
        for m in &e.provided.methods {
            out.push_str(&format!("{m}\n"));
        }
        out.push_str("keywords:");
        for k in &e.keywords {
            out.push(' ');
            out.push_str(k);
        }
        out.push('\n');
        write_dfa(&mut out, "provided", &e.provided_dfa);
        match &e.required_dfa {
            Some(d) => write_dfa(&mut out, "required", d),
            None => out.push_str("required: none\n"),
        }
    }
    out.push_str(&format!("end: {}\n", index.entries.len()));
    out
}

/// Writes the index atomically (temporary file, then rename).
pub fn save_cache(index: &CompiledIndex, path: &Path) -> Result<(), CacheError> {
    let io = |e: std::io::Error| CacheError::Io(format!("{}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, render(index)).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn corrupt(&self, message: impl Into<String>) -> CacheError {
        CacheError::Corrupt {
            line: self.pos,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<&'a str, CacheError> {
        let line = *self.lines.get(self.pos).ok_or(CacheError::Truncated)?;
        self.pos += 1;
        Ok(line)
    }

    fn field(&mut self, key: &str) -> Result<&'a str, CacheError> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .map(str::trim)
            .ok_or_else(|| self.corrupt(format!("expected `{key}:`")))
    }

    fn count(&mut self, key: &str) -> Result<usize, CacheError> {
        let v = self.field(key)?;
        v.parse().map_err(|_| self.corrupt(format!("bad count `{v}`")))
    }

    fn dfa(&mut self, lines: usize) -> Result<FiniteAutomaton, CacheError> {
        if lines == 0 {
            return Err(self.corrupt("empty automaton"));
        }
        let alphabet: Vec<String> = self.field("alphabet")?.split_whitespace().map(str::to_string).collect();
        let mut text = String::new();
        for _ in 1..lines {
            text.push_str(self.next()?);
            text.push('\n');
        }
        FiniteAutomaton::from_dfa_text(&text, Some(alphabet)).map_err(|e| self.corrupt(e.to_string()))
    }
}

fn parse_method(line: &str) -> Option<MethodSig> {
    let open = line.find('(')?;
    let close = line.rfind(')')?;
    let name = line[..open].trim();
    let inner = line.get(open + 1..close)?;
    let ret = match line[close + 1..].trim() {
        "" => None,
        r => Some(r.strip_prefix(':')?.trim().to_string()),
    };
    let params = inner
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (n, t) = p.split_once(':')?;
            Some(Param {
                name: n.trim().to_string(),
                ty: t.trim().to_string(),
            })
        })
        .collect::<Option<Vec<_>>>()?;
    (!name.is_empty()).then(|| MethodSig {
        name: name.to_string(),
        params,
        ret,
    })
}

fn parse(text: &str) -> Result<CompiledIndex, CacheError> {
    let mut r = Reader {
        lines: text.lines().collect(),
        pos: 0,
    };
    if r.lines.first() != Some(&CACHE_MAGIC) {
        return Err(CacheError::Version);
    }
    r.pos = 1;
    let hash = r.field("hash")?.to_string();
    let ntypes = r.count("types")?;
    let mut types = Vec::with_capacity(ntypes.min(1024));
    for _ in 0..ntypes {
        let line = r.next()?;
        let t = match line.split_once("<:") {
            Some((a, b)) => TypeDecl {
                name: a.trim().to_string(),
                supertype: Some(b.trim().to_string()),
            },
            None => TypeDecl {
                name: line.trim().to_string(),
                supertype: None,
            },
        };
        types.push(t);
    }
    let n = r.count("components")?;
    let mut entries = Vec::with_capacity(n.min(4096));
    for _ in 0..n {
        let component = r
            .next()?
            .strip_prefix("component ")
            .ok_or_else(|| r.corrupt("expected `component <name>`"))?
            .to_string();
        let head = r.next()?;
        let (iname, count) = head
            .strip_prefix("interface ")
            .and_then(|h| h.split_once(' '))
            .and_then(|(n, c)| Some((n.to_string(), c.parse::<usize>().ok()?)))
            .ok_or_else(|| r.corrupt("expected `interface <name> <count>`"))?;
        let mut methods = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let line = r.next()?;
            methods.push(parse_method(line).ok_or_else(|| r.corrupt("bad method signature"))?);
        }
        let keywords = r.field("keywords")?.split_whitespace().map(str::to_string).collect();
        let lines = r.count("provided")?;
        let provided_dfa = r.dfa(lines)?;
        let required_dfa = match r.field("required")? {
            "none" => None,
            v => {
                let lines = v.parse().map_err(|_| r.corrupt(format!("bad count `{v}`")))?;
                Some(r.dfa(lines)?)
            }
        };
        entries.push(IndexEntry {
            component,
            provided: Interface {
                name: iname,
                fields: Vec::new(),
                methods,
                extends: None,
            },
            keywords,
            provided_dfa,
            required_dfa,
        });
    }
    let end = r.count("end")?;
    if end != n || r.pos != r.lines.len() {
        return Err(r.corrupt("trailing data"));
    }
    if !entries.windows(2).all(|w| w[0].component < w[1].component) {
        return Err(CacheError::Corrupt {
            line: 0,
            message: "components out of order".into(),
        });
    }
    Ok(CompiledIndex { hash, types, entries })
}

/// Reads a cache file. Corrupt, truncated and foreign files are rejected.
pub fn load_cache(path: &Path) -> Result<CompiledIndex, CacheError> {
    let bytes = fs::read(path).map_err(|e| CacheError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|_| CacheError::Version)?;
    if !text.ends_with('\n') {
        return Err(CacheError::Truncated);
    }
    parse(&text)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CacheStatus {
    /// The cache matched the units.
    Fresh,
    /// No usable cache; the index was built and written.
    Built,
    /// The cache was rejected for the given reason and rebuilt.
    Rebuilt(CacheError),
}

/// Loads the cache when it matches the catalog, otherwise builds the index
/// and writes it to `path`. Failing to write the cache is not an error.
pub fn open_index(
    catalog: &Catalog,
    model: &Model,
    path: &Path,
    options: Options,
) -> Result<(CompiledIndex, CacheStatus), IndexError> {
    let expected = catalog.content_hash();
    let status = match load_cache(path) {
        Ok(index) if index.hash == expected => return Ok((index, CacheStatus::Fresh)),
        Ok(index) => CacheStatus::Rebuilt(CacheError::Stale {
            expected,
            found: index.hash,
        }),
        Err(CacheError::Io(_)) if !path.exists() => CacheStatus::Built,
        Err(e) => CacheStatus::Rebuilt(e),
    };
    let index = build_index(catalog, model, options)?;
    let _ = save_cache(&index, path);
    Ok((index, status))
}

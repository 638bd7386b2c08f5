use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use archmatch::category::{check_category, check_functor, FunctorError};
use archmatch::dsl::{has_errors, parse_protocol, parse_unit, Diagnostic, SourceUnit};
use archmatch::matcher::{match_requirement, render_json, render_text, MatchOptions, Recommendation, Requirement};
use archmatch::model::{resolve_units, Model};
use archmatch::protocol::{compile_over, minimal_dfa, sample_traces, ProtocolExpr};
use archmatch::repo::{self, build_index, load_cache, open_index, save_cache, CacheStatus, Catalog, Options};

use crate::{Cli, Command, Format, IndexAction};

/// A failure that ends the command with exit code 2.
struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

type Outcome = Result<u8, Fatal>;

pub fn run(cli: &Cli) -> u8 {
    let options = match state_limit() {
        Ok(state_limit) => Options {
            state_limit,
            ..Options::default()
        },
        Err(e) => {
            eprintln!("error: {}", e.0);
            return 2;
        }
    };
    let ctx = Context { cli, options };
    let outcome = match &cli.command {
        Command::Check { paths } => ctx.check(paths),
        Command::Arch { name, closure, check } => ctx.arch(name.as_deref(), *closure, *check),
        Command::Protocol {
            target,
            expr,
            unit,
            emit_dfa,
            sample,
        } => ctx.protocol(target.as_deref(), expr.as_deref(), unit.as_deref(), *emit_dfa, *sample),
        Command::Match {
            file,
            requirement,
            format,
            no_prefilter,
        } => ctx.matching(file, requirement.as_deref(), *format, !no_prefilter),
        Command::Link { name } => ctx.link(name),
        Command::Index { action } => ctx.index(action),
    };
    match outcome {
        Ok(code) => code,
        Err(Fatal(message)) => {
            eprintln!("error: {message}");
            2
        }
    }
}

fn state_limit() -> Result<usize, Fatal> {
    match std::env::var("ARCHMATCH_STATE_LIMIT") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Fatal(format!("ARCHMATCH_STATE_LIMIT must be a positive integer, got `{v}`"))),
        Err(_) => Ok(archmatch::protocol::DEFAULT_STATE_LIMIT),
    }
}

fn render_diags(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

fn read_unit(path: &Path) -> Result<SourceUnit, Fatal> {
    let text = std::fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
    Ok(SourceUnit::new(path.display().to_string(), text))
}

fn resolve_files(units: &[SourceUnit], model_types: &Model) -> Result<Model, Vec<Diagnostic>> {
    let mut trees = Vec::new();
    let mut diags = Vec::new();
    for u in units {
        match parse_unit(u) {
            Ok(t) => trees.push((u.path.as_str(), t)),
            Err(d) => diags.extend(d),
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let types: Vec<_> = model_types.types.values().cloned().collect();
    resolve_units(trees.iter().map(|(p, t)| (*p, t)), &types)
}

struct Context<'a> {
    cli: &'a Cli,
    options: Options,
}

impl Context<'_> {
    fn note(&self, message: &str) {
        if !self.cli.quiet {
            eprintln!("{message}");
        }
    }

    fn load(&self) -> Result<(Catalog, Model), Fatal> {
        repo::load(&self.cli.catalog, self.options).map_err(|e| Fatal(format!("cannot load catalog:\n{e}")))
    }

    fn cache_path(&self, catalog: &Catalog) -> PathBuf {
        self.cli.cache.clone().unwrap_or_else(|| catalog.default_cache_path())
    }

    fn check(&self, paths: &[PathBuf]) -> Outcome {
        let units = paths.iter().map(|p| read_unit(p)).collect::<Result<Vec<_>, _>>()?;
        match resolve_files(&units, &Model::default()) {
            Ok(model) => {
                println!(
                    "ok: {} unit(s), {} interface(s), {} contract(s), {} component(s)",
                    units.len(),
                    model.interfaces.len(),
                    model.contracts.len(),
                    model.components.len() + model.publications.len()
                );
                Ok(0)
            }
            Err(diags) => {
                print!("{}", render_diags(&diags));
                Ok(if has_errors(&diags) { 2 } else { 0 })
            }
        }
    }

    fn arch(&self, name: Option<&str>, closure: bool, check: bool) -> Outcome {
        let (catalog, _) = self.load()?;
        let selected: Vec<_> = match name {
            Some(n) => vec![catalog
                .architectures
                .get(n)
                .ok_or_else(|| Fatal(format!("unknown architecture `{n}`")))?],
            None => catalog.architectures.values().collect(),
        };
        let mut out = String::new();
        let mut errors = false;
        for (i, cat) in selected.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "architecture {} {}", cat.kind.as_str(), cat.name);
            let objects: Vec<&str> = cat.objects().iter().map(String::as_str).collect();
            let _ = writeln!(out, "  objects: {}", objects.join(", "));
            for m in cat.morphisms() {
                if m.derived && !closure {
                    continue;
                }
                let _ = writeln!(out, "  {m}{}", if m.derived { " (derived)" } else { "" });
            }
            let declared = cat.morphism_count() - cat.derived_count();
            if closure {
                let _ = writeln!(out, "  {declared} declared, {} derived", cat.derived_count());
            } else {
                let _ = writeln!(out, "  {declared} declared");
            }
            if check {
                let diags = check_category(cat);
                errors |= has_errors(&diags);
                for d in &diags {
                    let _ = writeln!(out, "  {d}");
                }
                if diags.is_empty() {
                    let _ = writeln!(out, "  well-formed");
                }
            }
        }
        print!("{out}");
        Ok(u8::from(errors))
    }

    fn protocol(
        &self,
        target: Option<&str>,
        expr: Option<&str>,
        unit: Option<&Path>,
        emit_dfa: bool,
        sample: Option<usize>,
    ) -> Outcome {
        let is_name = |t: &str| t.chars().all(|c| c.is_alphanumeric() || c == '_');
        let (expr, alphabet) = match (expr, target) {
            (Some(e), _) => (parse_expr(e)?, Vec::new()),
            (None, Some(t)) if !is_name(t) => (parse_expr(t)?, Vec::new()),
            (None, Some(name)) => {
                let model = match unit {
                    Some(path) => resolve_files(&[read_unit(path)?], &Model::default())
                        .map_err(|d| Fatal(render_diags(&d).trim_end().to_string()))?,
                    None => self.load()?.1,
                };
                lookup_protocol(&model, name)?
            }
            (None, None) => return Err(Fatal("give a contract, component or publication name, or --expr".into())),
        };
        let dfa = minimal_dfa(&compile_over(&expr, alphabet.iter().map(String::as_str)), self.options.state_limit)?;
        if emit_dfa {
            print!("{}", dfa.to_dfa_text()?);
        } else if let Some(n) = sample {
            for t in sample_traces(&dfa, n) {
                if t.is_empty() {
                    println!("(empty trace)");
                } else {
                    println!("{t}");
                }
            }
        } else {
            println!("{expr}");
            println!("{} states, alphabet {{{}}}", dfa.state_count(), dfa.alphabet().join(", "));
        }
        Ok(0)
    }

    fn matching(&self, path: &Path, name: Option<&str>, format: Format, prefilter: bool) -> Outcome {
        let (catalog, model) = self.load()?;
        let req_model = resolve_files(&[read_unit(path)?], &model).map_err(|d| Fatal(render_diags(&d).trim_end().to_string()))?;
        let req = Requirement::from_model(&req_model, name).map_err(Fatal)?;
        let (index, status) = open_index(&catalog, &model, &self.cache_path(&catalog), self.options)?;
        match status {
            CacheStatus::Fresh => {}
            CacheStatus::Built => self.note("index built"),
            CacheStatus::Rebuilt(why) => self.note(&format!("index rebuilt ({why})")),
        }
        let options = MatchOptions {
            prefilter,
            state_limit: self.options.state_limit,
            ..MatchOptions::default()
        };
        let result = match_requirement(&req, &index, options)?;
        match format {
            Format::Text => print!("{}", render_text(&result)),
            Format::Json => print!("{}", render_json(&result)),
        }
        Ok(match result.recommendation {
            Recommendation::New => 1,
            _ => 0,
        })
    }

    fn link(&self, name: &str) -> Outcome {
        let (catalog, _) = self.load()?;
        let f = catalog
            .links
            .get(name)
            .ok_or_else(|| Fatal(format!("unknown link `{name}`")))?;
        let verdict = check_functor(f).map_err(|e: FunctorError| Fatal(e.to_string()))?;
        if verdict.passed() {
            println!("PASS {name}");
            return Ok(0);
        }
        println!("FAIL {name}");
        for v in &verdict.violations {
            println!("  {v}");
        }
        Ok(1)
    }

    fn index(&self, action: &IndexAction) -> Outcome {
        match action {
            IndexAction::Build => {
                let (catalog, model) = self.load()?;
                let index = build_index(&catalog, &model, self.options)?;
                let path = self.cache_path(&catalog);
                save_cache(&index, &path)?;
                println!("indexed {} component(s) into {}", index.entries.len(), path.display());
                Ok(0)
            }
            IndexAction::Inspect => {
                let path = match &self.cli.cache {
                    Some(p) => p.clone(),
                    None => {
                        let mut name = self.cli.catalog.file_name().unwrap_or_default().to_os_string();
                        name.push(".idx");
                        self.cli.catalog.with_file_name(name)
                    }
                };
                let index = load_cache(&path)?;
                println!("hash: {}", index.hash);
                match self.load() {
                    Ok((catalog, _)) if catalog.content_hash() == index.hash => println!("status: fresh"),
                    Ok(_) => println!("status: stale"),
                    Err(_) => println!("status: unknown (catalog does not load)"),
                }
                println!("components: {}", index.entries.len());
                for e in &index.entries {
                    let required = e
                        .required_dfa
                        .as_ref()
                        .map_or(String::new(), |d| format!(", required {} states", d.state_count()));
                    println!(
                        "  {} ({}: {} methods, provided {} states{required})",
                        e.component,
                        e.provided.name,
                        e.provided.methods.len(),
                        e.provided_dfa.state_count()
                    );
                }
                Ok(0)
            }
        }
    }
}

fn parse_expr(text: &str) -> Result<ProtocolExpr, Fatal> {
    Ok(parse_protocol(text, None)?.0)
}

/// A named protocol and the alphabet it ranges over.
fn lookup_protocol(model: &Model, name: &str) -> Result<(ProtocolExpr, Vec<String>), Fatal> {
    let names = |i: &archmatch::model::Interface| i.methods.iter().map(|m| m.name.clone()).collect();
    if let Some(c) = model.contract(name) {
        return Ok((c.effective_protocol(), names(&c.iface)));
    }
    if let Some(p) = model.publication(name) {
        return Ok((p.provided.traces.clone(), names(&p.provided.iface)));
    }
    if let Some(c) = model.component(name) {
        let base = &c.provided.base;
        return Ok((base.effective_protocol(), names(&base.iface)));
    }
    Err(Fatal(format!("no contract, component or publication named `{name}`")))
}

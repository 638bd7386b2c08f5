//! Command-line front end for archmatch.
//!
//! Exit codes: 0 success (or HOLDS / USE / ADAPT / PASS), 1 negative
//! analysis result, 2 usage or input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "archmatch", version, about = "Architecture checks and component matching")]
pub struct Cli {
    /// Repository catalog: one ADL path per line, relative to the catalog.
    #[arg(long, global = true, default_value = "catalog.txt")]
    pub catalog: PathBuf,
    /// Index cache file (default: <catalog>.idx).
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Only print results; no warnings or progress notes.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and resolve ADL units.
    Check {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Print the catalog's architectures.
    Arch {
        /// Only this architecture.
        name: Option<String>,
        /// Include derived morphisms.
        #[arg(long)]
        closure: bool,
        /// Report well-formedness diagnostics.
        #[arg(long)]
        check: bool,
    },
    /// Inspect a protocol: a contract, component or publication name from the
    /// catalog (or from --unit), or a protocol expression.
    Protocol {
        target: Option<String>,
        /// Treat the target as a protocol expression.
        #[arg(long, conflicts_with = "target")]
        expr: Option<String>,
        /// Look the name up in this file instead of the catalog.
        #[arg(long)]
        unit: Option<PathBuf>,
        /// Print the minimal DFA.
        #[arg(long, conflicts_with = "sample")]
        emit_dfa: bool,
        /// Print accepted traces up to this length.
        #[arg(long, value_name = "N")]
        sample: Option<usize>,
    },
    /// Match a requirement against the repository.
    Match {
        /// ADL file declaring the requirement.
        #[arg(value_name = "REQUIREMENT_FILE")]
        file: PathBuf,
        /// Contract or interface in the requirement file to use.
        #[arg(long, value_name = "NAME")]
        requirement: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Match every component, not just keyword candidates.
        #[arg(long)]
        no_prefilter: bool,
    },
    /// Validate a declared link between architectures.
    Link { name: String },
    /// Build or inspect the index cache.
    Index {
        #[command(subcommand)]
        action: IndexAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum IndexAction {
    /// Compile the catalog and write the cache.
    Build,
    /// Summarize the cache and whether it matches the catalog.
    Inspect,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    ExitCode::from(commands::run(&cli))
}

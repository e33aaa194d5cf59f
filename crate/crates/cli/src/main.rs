//! `citerec` command-line tool.
//!
//! Exit codes: 0 success, 2 input error, 3 query error, 4 config error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use citerec::vectorizer::TypeFilter;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::commands::QueryError;
use crate::config::{ConfigError, KgSelection, Overrides, RunConfig};

const EXIT_INPUT: u8 = 2;
const EXIT_QUERY: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(
    name = "citerec",
    version,
    about = "Citation recommendation over concept vectors and embeddings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// KG variant: in-domain, cross-domain or both.
    #[arg(long)]
    kg: Option<KgSelection>,
    /// Concept types, e.g. `m,p,d,me` or `all`.
    #[arg(long)]
    types: Option<TypeFilter>,
    /// Cutoffs, e.g. `10,20,50`.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    min_citations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for ranking.
    #[arg(long)]
    threads: Option<usize>,
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            kg: self.kg,
            types: self.types,
            k_values: self.k.clone(),
            min_citations: self.min_citations,
            seed: self.seed,
            out: self.out.clone(),
            threads: self.threads,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build KG snapshots and corpus statistics from the input files.
    Ingest(Common),
    /// Rank every document against one query paper (top k = largest --k).
    Query {
        #[command(flatten)]
        common: Common,
        /// Paper id of the query.
        query_id: String,
        /// Embedding label from the config to add to the concept vector.
        #[arg(long)]
        embedding: Option<String>,
        /// Rank by the embedding alone.
        #[arg(long)]
        no_concepts: bool,
    },
    /// Run the full MAP@k configuration matrix.
    Evaluate(Common),
    /// Citing vs random pair similarity distributions.
    Stats(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Ingest(c) | Command::Evaluate(c) | Command::Stats(c) => c,
            Command::Query { common, .. } => common,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let common = cli.command.common();
    let config = RunConfig::load(&common.config, common.overrides())?;
    if let Some(n) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ConfigError(format!("cannot start {n} workers: {e}")))?;
    }
    match &cli.command {
        Command::Ingest(_) => commands::ingest(&config),
        Command::Query {
            query_id,
            embedding,
            no_concepts,
            ..
        } => {
            let tsv = commands::query(&config, query_id, embedding.as_deref(), !no_concepts)?;
            print!("{tsv}");
            Ok(())
        }
        Command::Evaluate(_) => commands::evaluate(&config),
        Command::Stats(_) => commands::stats(&config),
    }
}

fn exit_code(error: &anyhow::Error) -> u8 {
    if error.chain().any(|e| e.is::<ConfigError>()) {
        EXIT_CONFIG
    } else if error.chain().any(|e| e.is::<QueryError>()) {
        EXIT_QUERY
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.command.common().verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

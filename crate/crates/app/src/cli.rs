//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use stv_core::data::{parse_canonical, to_canonical_json};
use stv_core::{tabulate, trace_journey, CandidateId, ElectionData, HypotheticalBallot};

use crate::config::Config;
use crate::ingest::ingest;
use crate::server::{self, AppState};
use crate::store::ElectionStore;

#[derive(Debug, Parser)]
#[command(
    name = "stv",
    version,
    about = "Single Transferable Vote counts and vote journeys"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    /// Rule set name (built in: default, weighted)
    #[arg(long)]
    pub rules: Option<String>,
    /// TOML config file with named rule sets
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a canonical election file
    Validate { file: PathBuf },
    /// Count an election and print its transcript
    Count {
        file: PathBuf,
        #[command(flatten)]
        rules: RuleArgs,
        /// Write the transcript here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace one hypothetical ballot through the count
    Trace {
        file: PathBuf,
        /// Comma-separated candidate names or ids, most preferred first
        #[arg(long, conflicts_with = "htv", required_unless_present = "htv")]
        prefs: Option<String>,
        /// Use this party's how-to-vote card as the ballot
        #[arg(long)]
        htv: Option<String>,
        #[command(flatten)]
        rules: RuleArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a preference CSV and candidate manifest to a canonical file
    Ingest {
        csv: PathBuf,
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        rules: RuleArgs,
    },
    /// Serve the HTTP API and UI
    Serve {
        /// Directory of canonical election files
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        /// Static UI bundle served at /
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path) -> Result<ElectionData> {
    parse_canonical(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Each token is a candidate name or, failing that, a zero-based id.
pub fn parse_prefs(spec: &str, data: &ElectionData) -> Result<Vec<CandidateId>> {
    spec.split(',')
        .map(str::trim)
        .map(|token| {
            if let Some(c) = data.find_candidate(token) {
                return Ok(c);
            }
            match token.parse::<usize>() {
                Ok(id) => Ok(CandidateId(id)),
                Err(_) => bail!("unknown candidate {token:?}"),
            }
        })
        .collect()
}

fn run_command(command: Command) -> Result<()> {
    match command {
        Command::Validate { file } => {
            let data = load(&file)?;
            println!(
                "{}: ok ({} candidates, {} groups, {} vacancies, {} papers)",
                file.display(),
                data.num_candidates(),
                data.groups().len(),
                data.vacancies(),
                data.total_papers()
            );
        }
        Command::Count { file, rules, out } => {
            let config = Config::load_or_default(rules.config.as_deref())?;
            let rule_set = config.resolve(rules.rules.as_deref())?;
            let data = load(&file)?;
            let transcript = tabulate(&data, rule_set)?;
            emit(&transcript.to_json(), out.as_deref())?;
        }
        Command::Trace {
            file,
            prefs,
            htv,
            rules,
            out,
        } => {
            let config = Config::load_or_default(rules.config.as_deref())?;
            let rule_set = config.resolve(rules.rules.as_deref())?;
            let data = load(&file)?;
            let prefs = match (prefs, htv) {
                (Some(p), _) => parse_prefs(&p, &data)?,
                (None, Some(party)) => data.apply_htv(&party)?.preferences,
                (None, None) => bail!("one of --prefs and --htv is required"),
            };
            let ballot = HypotheticalBallot::new(prefs, &data)?;
            let report = trace_journey(&data, &ballot, rule_set)?;
            emit(&report.to_json(), out.as_deref())?;
        }
        Command::Ingest {
            csv,
            manifest,
            out,
            rules,
        } => {
            let config = Config::load_or_default(rules.config.as_deref())?;
            let rule_set = config.resolve(rules.rules.as_deref())?;
            let (data, report) = ingest(&read(&csv)?, &read(&manifest)?, rule_set)?;
            emit(&to_canonical_json(&data), Some(&out))?;
            eprint!("{report}");
        }
        Command::Serve {
            root,
            port,
            ui_dir,
            config,
        } => {
            let config = Config::load_or_default(config.as_deref())?;
            let root = root
                .or_else(|| config.root.clone())
                .context("no election store: pass --root or set root in the config")?;
            let port = port.unwrap_or(config.port);
            let store = ElectionStore::open(root)?;
            let state = Arc::new(AppState { store, config });
            tokio::runtime::Runtime::new()?.block_on(server::serve(state, port, ui_dir))?;
        }
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match run_command(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

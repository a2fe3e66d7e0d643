//! `ecoindex` batch runner: reads a TOML run config, calls the core
//! library section by section and writes JSON/CSV artifacts.
//!
//! Exit codes: 0 ok, 1 config or input error, 2 inconsistent judgment
//! matrix, 3 a report section failed.

pub mod config;
mod manifest;
mod output;
mod sections;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ecoindex_core::indices::IndexKind;
use log::info;
use thiserror::Error;

use config::{Format, Formats, LoadedConfig, Section};
use output::Sink;
use sections::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "ECOINDEX_OUT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] ecoindex_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Prefixes the message with the file it concerns.
    pub(crate) fn in_file(self, path: &std::path::Path) -> CliError {
        CliError::Input(format!("{}: {self}", path.display()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "ecoindex", version, about = "Composite ecological index toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides the config's [output] dir.
    #[arg(long, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    /// Write only this table format. Plot-data CSVs are always written.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_kind(s: &str) -> Result<IndexKind, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Indicator weights and consistency ratios from judgment matrices.
    Weights(CommonArgs),
    /// Score an index from direct inputs or station data.
    Index {
        #[command(flatten)]
        common: CommonArgs,
        /// Overrides [index] which.
        #[arg(long, value_parser = parse_kind)]
        which: Option<IndexKind>,
    },
    /// Carbon stock and CO2 ledger.
    Carbon(CommonArgs),
    /// Reserve planning scenarios.
    Plan(CommonArgs),
    /// Sensitivity of the expanded hazard index.
    Sensitivity(CommonArgs),
    /// Every configured section plus a manifest.
    Report(CommonArgs),
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Weights(c)
            | Command::Carbon(c)
            | Command::Plan(c)
            | Command::Sensitivity(c)
            | Command::Report(c) => c,
            Command::Index { common, .. } => common,
        }
    }

    fn single_section(&self) -> Option<Section> {
        match self {
            Command::Weights(_) => Some(Section::Weights),
            Command::Index { .. } => Some(Section::Index),
            Command::Carbon(_) => Some(Section::Carbon),
            Command::Plan(_) => Some(Section::Plan),
            Command::Sensitivity(_) => Some(Section::Sensitivity),
            Command::Report(_) => None,
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn execute(cmd: &Command) -> Result<i32, CliError> {
    let common = cmd.common();
    let mut loaded = LoadedConfig::load(&common.config)?;
    if let Command::Index {
        which: Some(kind), ..
    } = cmd
    {
        match loaded.config.index.as_mut() {
            Some(i) => i.which = *kind,
            None => return Err(CliError::Config("config has no [index] section".into())),
        }
    }

    let out_dir = common
        .out
        .clone()
        .or_else(|| loaded.config.output.dir.as_ref().map(|d| loaded.resolve(d)))
        .unwrap_or_else(|| PathBuf::from("ecoindex-out"));
    let formats = common
        .format
        .or(loaded.config.output.format)
        .map(Formats::only)
        .unwrap_or(Formats::BOTH);
    let mut sink = Sink::new(&out_dir, formats)?;
    info!("writing to {}", out_dir.display());

    match cmd.single_section() {
        Some(section) => {
            if !loaded.has(section) {
                return Err(CliError::Config(format!("config has no [{section}] section")));
            }
            match sections::run(section, &loaded, &mut sink)? {
                Outcome::Ok => Ok(EXIT_OK),
                Outcome::Inconsistent(msg) => {
                    eprintln!("{section}: {msg}");
                    Ok(EXIT_INCONSISTENT)
                }
            }
        }
        None => report(&loaded, &mut sink),
    }
}

fn report(loaded: &LoadedConfig, sink: &mut Sink) -> Result<i32, CliError> {
    let mut statuses = Vec::new();
    for section in Section::ALL.into_iter().filter(|s| loaded.has(*s)) {
        let status = match sections::run(section, loaded, sink) {
            Ok(Outcome::Ok) => manifest::SectionStatus::ok(section),
            Ok(Outcome::Inconsistent(msg)) => manifest::SectionStatus::inconsistent(section, msg),
            Err(e) => manifest::SectionStatus::failed(section, e.to_string()),
        };
        statuses.push(status);
    }
    if statuses.is_empty() {
        return Err(CliError::Config("config has no sections to run".into()));
    }
    eprintln!("{:<12} {:<12} detail", "section", "status");
    for s in &statuses {
        eprintln!("{:<12} {:<12} {}", s.section, s.status, s.detail.as_deref().unwrap_or(""));
    }
    let all_ok = statuses.iter().all(|s| s.status == "ok");
    manifest::write(loaded, sink, statuses)?;
    Ok(if all_ok { EXIT_OK } else { EXIT_PARTIAL })
}

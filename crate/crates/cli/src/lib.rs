//! The `amo` command line: configuration, band cache, emitters, and the
//! `verify` self-check suites.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod commands;
pub mod config;
pub mod emit;
pub mod error;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cache::Cache;
use crate::commands::{execute, Output};
use crate::config::{Cli, ExperimentConfig, Format};
use crate::error::{CliError, CliResult};

pub const CACHE_ENV: &str = "AMO_CACHE_DIR";
pub const THREADS_ENV: &str = "AMO_THREADS";

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code: 0 on success, 1 for invalid input, 2 when a
/// computation fails.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand => {
                    eprintln!("error: {}", CliError::UnknownCommand(subcommand_of(&e)));
                    return 1;
                }
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn subcommand_of(e: &clap::Error) -> String {
    e.get(clap::error::ContextKind::InvalidSubcommand).map(|v| v.to_string()).unwrap_or_default()
}

/// The config file, if any, with the command-line values laid over it.
pub fn resolve_config(cli: &Cli) -> CliResult<ExperimentConfig> {
    let overlay = match &cli.command {
        Some(c) => ExperimentConfig { command: c.clone(), global: cli.global.clone() }.to_value(),
        None => serde_json::to_value(&cli.global).map_err(|e| CliError::ConfigInvalid(e.to_string()))?,
    };
    match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::ConfigInvalid(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?.merged(&overlay)
        }
        None => match &cli.command {
            Some(_) => ExperimentConfig::from_value(overlay),
            None => Err(CliError::ConfigInvalid("no command given".into())),
        },
    }
}

/// Explicit setting, then `AMO_CACHE_DIR`, then a directory under the
/// system temporary directory.
pub fn cache_for(cfg: &ExperimentConfig) -> Cache {
    let dir = cfg
        .global
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .unwrap_or_else(|| std::env::temp_dir().join("amo-cache"));
    Cache::at(dir)
}

fn thread_count() -> CliResult<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::ConfigInvalid(format!("{THREADS_ENV}={s:?} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

fn run_parsed(cli: Cli) -> CliResult<()> {
    let cfg = resolve_config(&cli)?;
    let cache = cache_for(&cfg);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    let out = pool.install(|| execute(&cfg, &cache))?;
    let format = cfg.global.format.or_else(|| {
        match cfg.global.output_path.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            _ => None,
        }
    });
    let text = match (out, format) {
        (Output::Csv(t), None | Some(Format::Csv)) => t.to_csv(),
        (Output::Csv(t), Some(Format::Json)) => t.to_json()?,
        (Output::Json(s), None | Some(Format::Json)) => s,
        (Output::Json(_), Some(Format::Csv)) => {
            return Err(CliError::ConfigInvalid(format!("{} has no CSV form", cfg.command.name())))
        }
    };
    match &cfg.global.output_path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

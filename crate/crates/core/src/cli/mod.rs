//! Command-line front end.
//!
//! ```text
//! unruh-coherence run <config> [--out DIR]
//! unruh-coherence verify <config>
//! unruh-coherence figure <id> [--out DIR]
//! unruh-coherence limits --family {ghz,w} --N <int> --n <int>
//! ```
//!
//! `--threads <k>` caps the worker pool. Exit codes: 0 success, 1 a check
//! failed, 2 invalid arguments or config, 3 resource or convergence failure.

pub mod config;
pub mod figures;
pub mod run;
pub mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::coherence::SeriesTolerance;
use crate::states::Family;
use crate::Error;
use config::{ConfigError, RunConfig};
use figures::{figure_table, FigureId};
use run::{execute, limits_table, resolve_out_dir, OUT_DIR_ENV};
use table::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "unruh-coherence",
    version,
    about = "Coherence of GHZ and W states under the Unruh effect"
)]
struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a config, write its tables and a summary.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config and the environment).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a config's checks and write only the summary.
    Verify {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the data behind a figure as `<id>.csv`.
    Figure {
        id: String,
        #[arg(long, env = OUT_DIR_ENV)]
        out: Option<PathBuf>,
    },
    /// Print the infinite-acceleration coherence.
    Limits {
        #[arg(long)]
        family: Family,
        /// Number of parties.
        #[arg(long = "N")]
        parties: usize,
        /// Number of accelerated observers.
        #[arg(long = "n")]
        accelerated: usize,
    },
}

enum Failure {
    Config(PathBuf, ConfigError),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn load(path: &Path) -> Result<(RunConfig, Vec<u8>), Failure> {
    let bytes = std::fs::read(path).map_err(|e| {
        Failure::Lib(Error::Config(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| {
        Failure::Config(
            path.to_path_buf(),
            ConfigError {
                line: None,
                message: format!("not UTF-8: {e}"),
            },
        )
    })?;
    let cfg = RunConfig::parse(text).map_err(|e| Failure::Config(path.to_path_buf(), e))?;
    Ok((cfg, bytes))
}

fn run_config(path: &Path, out: Option<&Path>, tables: bool) -> Result<i32, Failure> {
    let (cfg, bytes) = load(path)?;
    let dir = resolve_out_dir(&cfg, path, out);
    let outcome = execute(&cfg, &bytes, &dir, tables)?;
    for c in &outcome.summary.checks {
        println!(
            "{:<24} residual {:<14} threshold {:<8} {}",
            c.name,
            table::format_sig(c.residual),
            table::format_sig(c.threshold),
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    for name in &outcome.skipped {
        println!("{name:<24} skipped (no admissible points)");
    }
    println!("summary: {}", outcome.summary_path.display());
    Ok(if outcome.summary.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Run { config, out } => run_config(&config, out.as_deref(), true),
        Command::Verify { config, out } => run_config(&config, out.as_deref(), false),
        Command::Figure { id, out } => {
            let id: FigureId = id.parse()?;
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            let path = dir.join(format!("{id}.csv"));
            figure_table(id, &SeriesTolerance::default())?.write(&path, Format::Csv)?;
            println!("{}", path.display());
            Ok(EXIT_OK)
        }
        Command::Limits {
            family,
            parties,
            accelerated,
        } => {
            let t = limits_table(family, parties, &[accelerated])?;
            print!("{}", t.to_csv()?.replace("\r\n", "\n"));
            Ok(EXIT_OK)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Resource(_) | Error::Convergence { .. } => EXIT_RESOURCE,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        None => dispatch(cli.command),
        Some(k) => match rayon::ThreadPoolBuilder::new()
            .num_threads(k.into())
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Failure::Lib(Error::Resource(format!("thread pool: {e}")))),
        },
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(path, e)) => {
            match e.line {
                Some(line) => eprintln!("error: {}:{line}: {}", path.display(), e.message),
                None => eprintln!("error: {}: {}", path.display(), e.message),
            }
            EXIT_INVALID
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

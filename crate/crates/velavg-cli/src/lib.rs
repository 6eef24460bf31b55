//! Command-line driver for the `velavg` toolkit.
//!
//! A run is described by a [`RunConfig`], read from a TOML file and/or flags,
//! validated in full, executed on a worker pool and written as a versioned
//! JSON record, an RFC-4180 CSV table and optional SVG plots.
//!
//! Exit codes: 0 when every check passes, 1 when a check misses its
//! tolerance, 2 for usage, configuration, computation or I/O errors. Code 2
//! prints an [`ErrorRecord`] as JSON on stderr.
//!
//! `VELAVG_WORKERS` sets the number of worker threads.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod plot;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;

pub use config::{Command, RunConfig};
pub use error::{CliError, ErrorKind, ErrorRecord};
pub use report::{emit_report, Check, Formats, RunReport};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "VELAVG_WORKERS";

fn worker_pool() -> Result<Option<rayon::ThreadPool>, CliError> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| CliError::config(format!("{WORKERS_ENV} = '{raw}' must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| CliError::config(format!("worker pool: {e}")))
}

/// Validates, computes and writes the reports of one configured run.
pub fn execute(cfg: RunConfig) -> Result<(RunReport, Vec<std::path::PathBuf>), CliError> {
    let pool = worker_pool()?;
    let job = commands::plan(&cfg)?;
    let mut run = RunReport::new(cfg.command()?, cfg.clone());
    match pool {
        Some(p) => p.install(|| job(&mut run))?,
        None => job(&mut run)?,
    }
    run.finish();
    let o = &cfg.output;
    let files = emit_report(&run, Formats { json: o.json, csv: o.csv, svg: o.plots }, &o.dir)?;
    Ok((run, files))
}

fn run_inner<I, T>(argv: I, out: &mut dyn Write) -> Result<i32, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) => {
            write!(out, "{e}")?;
            return Ok(0);
        }
        Err(e) => return Err(CliError { kind: ErrorKind::Usage, message: e.to_string().trim_end().to_string() }),
    };
    let (cmd, flags) = cli.sub.split();
    let cfg = flags.resolve(cmd)?;
    if flags.print_config {
        cfg.validate_sections()?;
        write!(out, "{}", cfg.to_toml()?)?;
        return Ok(0);
    }
    let (run, files) = execute(cfg)?;
    for c in &run.checks {
        writeln!(
            out,
            "{} {}: {:.6e} ({:?} {:.3e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.bound,
            c.threshold
        )?;
    }
    for r in &run.reports {
        for w in &r.warnings {
            writeln!(out, "warning [{}]: {w}", r.check)?;
        }
    }
    for f in &files {
        writeln!(out, "wrote {}", f.display())?;
    }
    Ok(run.exit_code)
}

/// Runs the command line `argv` (program name first), writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run_inner(argv, out) {
        Ok(code) => code,
        Err(e) => {
            let record = ErrorRecord {
                schema: report::SCHEMA,
                schema_version: report::SCHEMA_VERSION,
                exit_code: 2,
                kind: e.kind,
                message: &e.message,
            };
            let text = serde_json::to_string(&record).unwrap_or_else(|_| e.message.clone());
            let _ = writeln!(err, "{text}");
            2
        }
    }
}

/// Runs `argv` against stdout and stderr and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}
